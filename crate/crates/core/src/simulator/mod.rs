//! Discrete-time simulation with batch-means steady-state estimates and
//! probes for the drift terms, state-space-collapse moments, and the
//! facet-service probabilities.

mod collector;
mod jsq;
mod record;
mod switch;

use serde::{Deserialize, Serialize};

pub use jsq::run_jsq;
pub use record::{DriftEstimates, MomentEstimate, PiHat, SimRecord};
pub use switch::run_switch;

use crate::error::{Error, Result};

/// Default cap on the measured horizon.
pub const DEFAULT_HORIZON_CAP: u64 = 100_000_000;

/// How the switch picks its schedule each slot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheduler {
    /// Scan the service set; ties broken uniformly at random.
    #[default]
    Enumerate,
    /// Assignment solver over the `N×N` queue matrix (input-queued switches
    /// only); ties broken deterministically by solver order.
    Matching,
}

/// Run-length, seeding and probe settings for one simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub burn_in: u64,
    pub horizon: u64,
    pub batches: usize,
    pub seed: u64,
    pub moment_orders: Vec<u32>,
    /// Weight vector for `⟨q, w⟩`; defaults to `ν` for a switch and `1` for JSQ.
    pub w: Option<Vec<f64>>,
    pub scheduler: Scheduler,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            burn_in: 10_000,
            horizon: 1_000_000,
            batches: 20,
            seed: 0,
            moment_orders: vec![1, 2, 3, 4],
            w: None,
            scheduler: Scheduler::Enumerate,
        }
    }
}

impl RunConfig {
    /// Run lengths that grow as the system approaches heavy traffic:
    /// burn-in `10⁵/ε`, horizon `10⁶/ε²` capped at `cap`.
    pub fn for_eps(eps: f64, seed: u64, cap: u64) -> Self {
        let horizon = ((1e6 / (eps * eps)).ceil() as u64).min(cap);
        Self { burn_in: (1e5 / eps).ceil() as u64, horizon, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batches < 2 {
            return Err(Error::InvalidConfig("need at least 2 batches".into()));
        }
        if self.horizon < 10 * self.batches as u64 {
            return Err(Error::InvalidConfig(format!(
                "horizon {} is shorter than 10 x {} batches",
                self.horizon, self.batches
            )));
        }
        if self.moment_orders.contains(&0) {
            return Err(Error::InvalidConfig("moment orders must be >= 1".into()));
        }
        Ok(())
    }

    pub(crate) fn batch_len(&self) -> u64 {
        self.horizon / self.batches as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_scaled_lengths() {
        let c = RunConfig::for_eps(0.1, 3, DEFAULT_HORIZON_CAP);
        assert_eq!(c.burn_in, 1_000_000);
        assert_eq!(c.horizon, 100_000_000);
        let c = RunConfig::for_eps(0.2, 3, DEFAULT_HORIZON_CAP);
        assert_eq!(c.horizon, 25_000_000);
        let c = RunConfig::for_eps(0.01, 3, DEFAULT_HORIZON_CAP);
        assert_eq!(c.horizon, DEFAULT_HORIZON_CAP);
    }

    #[test]
    fn validation() {
        let mut c = RunConfig { horizon: 100, batches: 20, ..RunConfig::default() };
        assert!(c.validate().is_err());
        c.horizon = 200;
        assert!(c.validate().is_ok());
        c.batches = 1;
        assert!(c.validate().is_err());
    }
}
