use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, PrivacyBudget, Result};

/// Cap on output length that applies regardless of privacy.
pub const DEFAULT_T_MAX_CAP: usize = 64;

/// Public token-domain size used by the limited-domain cutoff.
pub const DEFAULT_DOMAIN_SIZE: usize = 50_272;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    NonRag,
    VoteRag,
    DpVoteRag,
    DpSparseVoteRag,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::NonRag,
        Algorithm::VoteRag,
        Algorithm::DpVoteRag,
        Algorithm::DpSparseVoteRag,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::NonRag => "non-rag",
            Algorithm::VoteRag => "vote-rag",
            Algorithm::DpVoteRag => "dp-vote-rag",
            Algorithm::DpSparseVoteRag => "dp-sparse-vote-rag",
        }
    }

    pub fn is_private(&self) -> bool {
        matches!(self, Algorithm::DpVoteRag | Algorithm::DpSparseVoteRag)
    }

    pub fn uses_retrieval(&self) -> bool {
        !matches!(self, Algorithm::NonRag)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("unknown algorithm {s:?}")))
    }
}

/// Hyperparameters of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Number of voters.
    pub m: usize,
    /// Documents per voter.
    pub k: usize,
    pub per_token: PrivacyBudget,
    pub total: PrivacyBudget,
    /// Gate threshold; `None` means `m / 2`.
    pub tau: Option<f64>,
    pub t_max_cap: usize,
    pub domain_size: usize,
    pub seed: u64,
}

impl RunConfig {
    /// `k = 1`, `tau = m / 2`, 64-token cap, 50272-token domain.
    pub fn new(algorithm: Algorithm, m: usize, per_token: PrivacyBudget, total: PrivacyBudget, seed: u64) -> Self {
        Self {
            algorithm,
            m,
            k: 1,
            per_token,
            total,
            tau: None,
            t_max_cap: DEFAULT_T_MAX_CAP,
            domain_size: DEFAULT_DOMAIN_SIZE,
            seed,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or(self.m as f64 / 2.0)
    }

    /// Candidate-set size of the limited-domain selector: one slot per voter.
    pub fn k_bar(&self) -> usize {
        self.m
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("m must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.t_max_cap == 0 {
            return Err(Error::invalid("t_max_cap must be at least 1"));
        }
        if let Some(tau) = self.tau {
            if !tau.is_finite() {
                return Err(Error::invalid("tau must be finite"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let b = PrivacyBudget::new(1.0, 1e-5).unwrap();
        let c = RunConfig::new(Algorithm::DpSparseVoteRag, 50, b, b, 0);
        assert_eq!(c.tau(), 25.0);
        assert_eq!(c.k_bar(), 50);
        assert_eq!(c.k, 1);
        assert_eq!(c.t_max_cap, 64);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("dp".parse::<Algorithm>().is_err());
    }
}
