use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::noise::sample_laplace;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// The noisy count cleared the noisy threshold.
    Above,
    /// The noisy count fell at or below the threshold; the state is spent.
    Below,
}

/// Noisy threshold of the above-threshold gate.
///
/// A `Below` verdict halts the gate: further queries fail until
/// [`refresh`](Self::refresh) draws a new threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyThreshold {
    tau: f64,
    tau_hat: f64,
    epsilon_lap: f64,
    consumed: bool,
}

impl NoisyThreshold {
    /// `tau_hat = tau + Lap(2 / epsilon_lap)`.
    pub fn new<R: RngCore + ?Sized>(tau: f64, epsilon_lap: f64, rng: &mut R) -> Result<Self> {
        if !(epsilon_lap.is_finite() && epsilon_lap > 0.0) {
            return Err(Error::invalid("epsilon_lap must be a positive finite number"));
        }
        let tau_hat = tau + sample_laplace(2.0 / epsilon_lap, rng)?;
        Ok(Self {
            tau,
            tau_hat,
            epsilon_lap,
            consumed: false,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn tau_hat(&self) -> f64 {
        self.tau_hat
    }

    pub fn epsilon_lap(&self) -> f64 {
        self.epsilon_lap
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Draws `v = Lap(4 / epsilon_lap)` and answers `Below` iff
    /// `count + v <= tau_hat`.
    pub fn query<R: RngCore + ?Sized>(&mut self, count: u32, rng: &mut R) -> Result<Verdict> {
        if self.consumed {
            return Err(Error::ContractViolation(
                "threshold queried again after a Below verdict without refresh",
            ));
        }
        let v = sample_laplace(4.0 / self.epsilon_lap, rng)?;
        if count as f64 + v <= self.tau_hat {
            self.consumed = true;
            Ok(Verdict::Below)
        } else {
            Ok(Verdict::Above)
        }
    }

    /// Redraws `tau_hat` around the same `tau` and re-arms the gate.
    pub fn refresh<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        self.tau_hat = self.tau + sample_laplace(2.0 / self.epsilon_lap, rng)?;
        self.consumed = false;
        Ok(())
    }
}
