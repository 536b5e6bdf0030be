use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{GenerationContext, Generator, Token, Vocabulary, EOS_ID};
use crate::mechanisms::TokenId;
use crate::text::words;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NgramConfig {
    /// n: histories hold up to n - 1 words.
    pub order: usize,
    /// Add-alpha smoothing constant.
    pub alpha: f64,
    /// Weight of counts taken from the documents in the context, relative to
    /// counts from training text.
    pub context_weight: f64,
}

impl Default for NgramConfig {
    fn default() -> Self {
        Self {
            order: 3,
            alpha: 0.1,
            context_weight: 4.0,
        }
    }
}

type Counts = BTreeMap<Vec<TokenId>, BTreeMap<TokenId, f64>>;

/// Word-level n-gram model with backoff and add-alpha smoothing.
///
/// Documents in the context are counted like training text (scaled by
/// `context_weight`), which is how retrieved knowledge reaches the output.
/// The history is the last n - 1 words of documents ⊕ question ⊕ prefix.
/// Decoding backs off from the longest history with any mass to the unigram
/// table, and takes the arg-max with ties to the lowest token id.
#[derive(Clone, Debug)]
pub struct NgramModel {
    config: NgramConfig,
    vocab: Vocabulary,
    /// `counts[h]` holds histories of length `h`.
    counts: Vec<Counts>,
}

fn add_sequence(counts: &mut [Counts], seq: &[Option<TokenId>], weight: f64) {
    for (i, next) in seq.iter().enumerate() {
        let Some(next) = *next else { continue };
        for (h, table) in counts.iter_mut().enumerate() {
            if h > i {
                break;
            }
            let history: Option<Vec<TokenId>> = seq[i - h..i].iter().copied().collect();
            if let Some(history) = history {
                *table.entry(history).or_default().entry(next).or_insert(0.0) += weight;
            }
        }
    }
}

impl NgramModel {
    /// Trains on `texts`, each ending in end-of-sequence.
    pub fn train<S: AsRef<str>>(texts: &[S], config: NgramConfig) -> Result<Self> {
        if config.order == 0 {
            return Err(Error::invalid("n-gram order must be at least 1"));
        }
        if !(config.alpha.is_finite() && config.alpha > 0.0) {
            return Err(Error::invalid("smoothing alpha must be positive"));
        }
        if !(config.context_weight.is_finite() && config.context_weight >= 0.0) {
            return Err(Error::invalid("context weight must be non-negative"));
        }
        if texts.iter().all(|t| words(t.as_ref()).is_empty()) {
            return Err(Error::invalid("training corpus is empty"));
        }
        let mut vocab = Vocabulary::new();
        let mut counts: Vec<Counts> = (0..config.order).map(|_| Counts::new()).collect();
        for text in texts {
            let mut seq: Vec<Option<TokenId>> = words(text.as_ref()).iter().map(|w| Some(vocab.intern(w))).collect();
            seq.push(Some(EOS_ID));
            add_sequence(&mut counts, &seq, 1.0);
        }
        Ok(Self { config, vocab, counts })
    }

    /// Registers the words of `texts` so they can be produced when they show
    /// up in context documents. Adds no counts.
    pub fn extend_vocabulary<S: AsRef<str>>(&mut self, texts: &[S]) {
        for text in texts {
            for w in words(text.as_ref()) {
                self.vocab.intern(&w);
            }
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn config(&self) -> &NgramConfig {
        &self.config
    }

    fn lookup(&self, text: &str) -> Vec<Option<TokenId>> {
        words(text).iter().map(|w| self.vocab.get(w)).collect()
    }

    fn context_counts(&self, ctx: &GenerationContext<'_>) -> Vec<Counts> {
        let mut counts: Vec<Counts> = (0..self.config.order).map(|_| Counts::new()).collect();
        if self.config.context_weight > 0.0 {
            for doc in ctx.documents {
                let mut seq = self.lookup(&doc.text);
                seq.push(Some(EOS_ID));
                add_sequence(&mut counts, &seq, self.config.context_weight);
            }
        }
        counts
    }

    fn history(&self, ctx: &GenerationContext<'_>) -> Vec<Option<TokenId>> {
        let want = self.config.order - 1;
        let mut tail: Vec<Option<TokenId>> = ctx
            .prefix
            .iter()
            .filter(|t| !t.is_eos())
            .map(|t| self.vocab.get(&t.surface))
            .collect();
        if tail.len() < want {
            let mut head = self.lookup(ctx.question);
            for doc in ctx.documents.iter().rev() {
                if head.len() + tail.len() >= want {
                    break;
                }
                let mut d = self.lookup(&doc.text);
                d.extend(head);
                head = d;
            }
            head.extend(tail);
            tail = head;
        }
        let start = tail.len().saturating_sub(want);
        tail.split_off(start)
    }

    /// Next-token counts at the longest history that has any mass, with the
    /// history length used.
    fn backoff(&self, ctx: &GenerationContext<'_>) -> (usize, BTreeMap<TokenId, f64>) {
        let context = self.context_counts(ctx);
        let history = self.history(ctx);
        for h in (0..self.config.order).rev() {
            if h > history.len() {
                continue;
            }
            let Some(key): Option<Vec<TokenId>> = history[history.len() - h..].iter().copied().collect() else {
                continue;
            };
            let mut merged: BTreeMap<TokenId, f64> = BTreeMap::new();
            for table in [&self.counts[h], &context[h]] {
                if let Some(next) = table.get(&key) {
                    for (&t, &c) in next {
                        *merged.entry(t).or_insert(0.0) += c;
                    }
                }
            }
            if !merged.is_empty() {
                return (h, merged);
            }
        }
        (0, BTreeMap::new())
    }

    /// Smoothed probability of `token` given the context, at the backoff
    /// order used for decoding.
    pub fn probability(&self, ctx: &GenerationContext<'_>, token: TokenId) -> f64 {
        let (_, counts) = self.backoff(ctx);
        let total: f64 = counts.values().sum();
        let alpha = self.config.alpha;
        (counts.get(&token).copied().unwrap_or(0.0) + alpha) / (total + alpha * self.vocab.len() as f64)
    }
}

impl Generator for NgramModel {
    fn next_token(&self, ctx: &GenerationContext<'_>) -> Result<Token> {
        let (_, counts) = self.backoff(ctx);
        let mut best: Option<(TokenId, f64)> = None;
        for (t, c) in counts {
            if best.map_or(true, |(_, b)| c > b) {
                best = Some((t, c));
            }
        }
        let id = best.map_or(EOS_ID, |(t, _)| t);
        Ok(self.vocab.token(id).expect("counted ids are interned"))
    }
}
