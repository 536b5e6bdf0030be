use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Identifier of a token within a vocabulary.
///
/// The natural ordering is the tie-break order used everywhere a choice
/// between equal counts (or equal noisy scores) has to be made.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenId(pub u32);

/// Vote counts over tokens, one vote per voter.
///
/// Tokens never voted for are absent; `count` reports 0 for them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenHistogram {
    counts: BTreeMap<TokenId, u32>,
    voter_count: u32,
}

impl TokenHistogram {
    pub fn from_votes<I: IntoIterator<Item = TokenId>>(votes: I) -> Self {
        let mut hist = Self::default();
        for token in votes {
            *hist.counts.entry(token).or_insert(0) += 1;
            hist.voter_count += 1;
        }
        hist
    }

    /// Builds a histogram from explicit counts; zero counts are dropped.
    pub fn from_counts<I: IntoIterator<Item = (TokenId, u32)>>(counts: I) -> Self {
        let mut hist = Self::default();
        for (token, c) in counts {
            if c > 0 {
                *hist.counts.entry(token).or_insert(0) += c;
                hist.voter_count += c;
            }
        }
        hist
    }

    pub fn count(&self, token: TokenId) -> u32 {
        self.counts.get(&token).copied().unwrap_or(0)
    }

    pub fn voter_count(&self) -> u32 {
        self.voter_count
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voter_count == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (TokenId, u32)> + '_ {
        self.counts.iter().map(|(&t, &c)| (t, c))
    }

    /// Tokens ordered by count descending, ties by ascending token id.
    pub fn ranked(&self) -> Vec<(TokenId, u32)> {
        let mut ranked: Vec<_> = self.iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked
    }

    /// The `rank`-th largest count (1-based), or 0 when fewer tokens exist.
    pub fn nth_largest_count(&self, rank: usize) -> u32 {
        if rank == 0 {
            return 0;
        }
        let mut counts: Vec<u32> = self.counts.values().copied().collect();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        counts.get(rank - 1).copied().unwrap_or(0)
    }

    /// The most frequent token, lowest id on ties.
    pub fn plurality(&self) -> Option<(TokenId, u32)> {
        self.ranked().first().copied()
    }
}
