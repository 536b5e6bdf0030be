//! How many private releases a total budget affords, and run-time tracking
//! of what has been spent.
//!
//! Both composition rules are evaluated; the plan keeps whichever allows more
//! steps. Advanced composition splits the total delta evenly between the
//! slack term and the per-step deltas.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, PrivacyBudget, Result};

/// Relative slack when comparing a composed cost against its limit, so
/// `10 * 0.1 <= 1.0` holds despite rounding.
pub const REL_TOL: f64 = 1e-12;

/// Upper end of the advanced-composition scan.
pub const SCAN_CAP: u64 = 1_000_000;

fn within(cost: f64, limit: f64) -> bool {
    cost <= limit * (1.0 + REL_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompositionRule {
    Sequential,
    Advanced,
}

impl CompositionRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            CompositionRule::Sequential => "sequential",
            CompositionRule::Advanced => "advanced",
        }
    }
}

/// Whether `steps` compositions of `per_token` fit in `total` under `rule`.
pub fn fits(rule: CompositionRule, steps: u64, per_token: &PrivacyBudget, total: &PrivacyBudget) -> bool {
    let t = steps as f64;
    let (e0, d0) = (per_token.epsilon(), per_token.delta());
    match rule {
        CompositionRule::Sequential => {
            within(t * e0, total.epsilon()) && within(t * d0, total.delta())
        }
        CompositionRule::Advanced => {
            let half = total.delta() / 2.0;
            if half <= 0.0 {
                return false;
            }
            let eps = libm::sqrt(2.0 * t * libm::log(1.0 / half)) * e0 + t * e0 * libm::expm1(e0);
            within(eps, total.epsilon()) && within(t * d0, half)
        }
    }
}

/// `min(floor(eps_total / eps_0), floor(delta_total / delta_0))`, with a zero
/// per-token delta leaving only the epsilon constraint.
pub fn sequential_max(per_token: &PrivacyBudget, total: &PrivacyBudget) -> u64 {
    let by_eps = libm::floor(total.epsilon() / per_token.epsilon());
    let by_delta = if per_token.delta() > 0.0 {
        libm::floor(total.delta() / per_token.delta())
    } else {
        f64::INFINITY
    };
    let guess = by_eps.min(by_delta).min(u64::MAX as f64 / 2.0) as u64;
    // floor() of a rounded quotient can be off by one either way
    let rule = CompositionRule::Sequential;
    let mut t = guess;
    while t > 0 && !fits(rule, t, per_token, total) {
        t -= 1;
    }
    while fits(rule, t + 1, per_token, total) {
        t += 1;
    }
    t
}

/// Largest `T` with `sqrt(2T ln(1/d')) e0 + T e0 (e^e0 - 1) <= eps_total` and
/// `T d0 <= delta_total / 2`, where `d' = delta_total / 2`. Linear scan from
/// 1, stopping at the first violation or at [`SCAN_CAP`].
pub fn advanced_max(per_token: &PrivacyBudget, total: &PrivacyBudget) -> u64 {
    let mut t = 0;
    while t < SCAN_CAP && fits(CompositionRule::Advanced, t + 1, per_token, total) {
        t += 1;
    }
    t
}

/// The number of private steps a run may take.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionPlan {
    pub per_token: PrivacyBudget,
    pub total: PrivacyBudget,
    pub max_steps: u64,
    pub rule_used: CompositionRule,
}

/// The larger of the sequential and advanced step counts (sequential wins
/// ties). Fails when neither rule allows a single step.
pub fn max_compositions(per_token: &PrivacyBudget, total: &PrivacyBudget) -> Result<CompositionPlan> {
    let seq = sequential_max(per_token, total);
    let adv = advanced_max(per_token, total);
    let (max_steps, rule_used) = if adv > seq {
        (adv, CompositionRule::Advanced)
    } else {
        (seq, CompositionRule::Sequential)
    };
    if max_steps == 0 {
        return Err(Error::InfeasibleBudget {
            per_token: format!("{per_token}"),
            total: format!("{total}"),
        });
    }
    Ok(CompositionPlan {
        per_token: *per_token,
        total: *total,
        max_steps,
        rule_used,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LedgerEventKind {
    PrivateVote,
    SparsePass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEvent {
    pub step_index: usize,
    pub kind: LedgerEventKind,
}

/// Remaining private steps of one run.
///
/// `remaining + #PrivateVote == plan.max_steps` at all times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrivacyLedger {
    plan: CompositionPlan,
    remaining: u64,
    events: Vec<LedgerEvent>,
}

impl PrivacyLedger {
    pub fn new(plan: CompositionPlan) -> Self {
        Self {
            plan,
            remaining: plan.max_steps,
            events: Vec::new(),
        }
    }

    pub fn plan(&self) -> &CompositionPlan {
        &self.plan
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.events
    }

    pub fn private_votes(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.kind == LedgerEventKind::PrivateVote)
            .count()
    }

    /// Charges one private vote.
    pub fn consume(&mut self, step_index: usize) -> Result<()> {
        if self.remaining == 0 {
            return Err(Error::BudgetExhausted);
        }
        self.remaining -= 1;
        self.events.push(LedgerEvent {
            step_index,
            kind: LedgerEventKind::PrivateVote,
        });
        Ok(())
    }

    /// Records a free step answered by the non-private generator.
    pub fn record_pass(&mut self, step_index: usize) {
        self.events.push(LedgerEvent {
            step_index,
            kind: LedgerEventKind::SparsePass,
        });
    }
}
