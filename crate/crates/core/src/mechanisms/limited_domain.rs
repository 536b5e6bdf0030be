use alloc::vec::Vec;

use rand::RngCore;

use super::histogram::{TokenHistogram, TokenId};
use super::noise::sample_gumbel;
use crate::{Error, PrivacyBudget, Result};

/// Parameters of the limited-domain private top-1 selector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitedDomainConfig {
    k_bar: usize,
    budget: PrivacyBudget,
    domain_size: usize,
}

impl LimitedDomainConfig {
    /// `k_bar` candidates are kept out of a public domain of `domain_size`
    /// tokens. Requires `k_bar >= 1`, `domain_size > k_bar` and a strictly
    /// positive delta.
    pub fn new(k_bar: usize, budget: PrivacyBudget, domain_size: usize) -> Result<Self> {
        if k_bar == 0 {
            return Err(Error::invalid("k_bar must be at least 1"));
        }
        if budget.delta() <= 0.0 {
            return Err(Error::invalid("limited-domain selection requires delta > 0"));
        }
        if domain_size <= k_bar {
            return Err(Error::invalid("domain size must exceed k_bar"));
        }
        Ok(Self {
            k_bar,
            budget,
            domain_size,
        })
    }

    pub fn k_bar(&self) -> usize {
        self.k_bar
    }

    pub fn budget(&self) -> PrivacyBudget {
        self.budget
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// Count of the synthetic "no safe winner" candidate:
    /// `h_(k+1) + 1 + ceil(ln(min(k, |V| - k) / delta) / eps)`.
    pub fn cutoff(&self, hist: &TokenHistogram) -> f64 {
        let eps = self.budget.epsilon();
        let delta = self.budget.delta();
        let spread = self.k_bar.min(self.domain_size - self.k_bar) as f64;
        let margin = libm::ceil(libm::log(spread / delta) / eps);
        hist.nth_largest_count(self.k_bar + 1) as f64 + 1.0 + margin
    }
}

/// Private arg-max over `hist`; `None` means the cutoff candidate won.
///
/// The `k_bar` largest counts (ties by token id) are the candidates. Each
/// candidate and the cutoff get independent Gumbel(1/eps) noise, drawn in
/// ascending token-id order with the cutoff last. Equal noisy scores go to
/// the lower token id, and the cutoff loses every tie.
pub fn limited_domain_top1<R: RngCore + ?Sized>(
    hist: &TokenHistogram,
    cfg: &LimitedDomainConfig,
    rng: &mut R,
) -> Result<Option<TokenId>> {
    if hist.is_empty() {
        return Err(Error::invalid("histogram has no votes"));
    }
    let scale = 1.0 / cfg.budget.epsilon();
    let mut candidates: Vec<(TokenId, u32)> = hist.ranked();
    candidates.truncate(cfg.k_bar);
    candidates.sort_by_key(|&(t, _)| t);

    let mut best: Option<(TokenId, f64)> = None;
    for (token, count) in candidates {
        let score = count as f64 + sample_gumbel(scale, rng)?;
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((token, score));
        }
    }
    let cutoff_score = cfg.cutoff(hist) + sample_gumbel(scale, rng)?;
    Ok(match best {
        Some((token, score)) if score >= cutoff_score => Some(token),
        _ => None,
    })
}
