use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An (epsilon, delta) privacy budget.
///
/// `epsilon` is strictly positive and finite, `delta` lies in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBudget", into = "RawBudget")]
pub struct PrivacyBudget {
    epsilon: f64,
    delta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawBudget {
    epsilon: f64,
    delta: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::invalid("epsilon must be a positive finite number"));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::invalid("delta must lie in [0, 1)"));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same delta, epsilon divided by `parts`.
    pub fn split_epsilon(&self, parts: f64) -> Result<Self> {
        Self::new(self.epsilon / parts, self.delta)
    }
}

impl TryFrom<RawBudget> for PrivacyBudget {
    type Error = Error;

    fn try_from(raw: RawBudget) -> Result<Self> {
        Self::new(raw.epsilon, raw.delta)
    }
}

impl From<PrivacyBudget> for RawBudget {
    fn from(b: PrivacyBudget) -> Self {
        RawBudget {
            epsilon: b.epsilon,
            delta: b.delta,
        }
    }
}

impl fmt::Display for PrivacyBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(eps={}, delta={})", self.epsilon, self.delta)
    }
}
