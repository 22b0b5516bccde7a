use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SwitchGeometry, DEFAULT_FACET_TOL};
use crate::model::{
    iq_switch_channel, iq_switch_region, iq_uniform_nu, ArrivalFamily, ChannelModel, ChannelState,
    LoadBalanceModel, Pmf, ServiceSet,
};
use crate::simulator::{RunConfig, Scheduler, DEFAULT_HORIZON_CAP};

/// One channel state of a generalized switch: probability and service vectors.
/// The service set is closed under coordinate projections on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub psi: f64,
    pub services: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    Switch {
        states: Vec<StateSpec>,
        nu: Vec<f64>,
    },
    IqSwitch {
        ports: usize,
        /// Defaults to the uniform direction with every entry `1/N`.
        #[serde(default)]
        nu: Option<Vec<f64>>,
    },
    Jsq {
        servers: Vec<Pmf>,
        /// Drift gap used in the collapse bound; defaults to `μ_min / 2`.
        #[serde(default)]
        delta: Option<f64>,
    },
}

/// Optional overrides applied on top of the `ε`-scaled run lengths.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOverrides {
    pub burn_in: Option<u64>,
    pub horizon: Option<u64>,
    pub horizon_cap: Option<u64>,
    pub batches: Option<usize>,
    pub moment_orders: Option<Vec<u32>>,
    pub w: Option<Vec<f64>>,
    pub scheduler: Option<Scheduler>,
}

/// Tolerances used by `verify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySettings {
    /// Relative tolerance on the heavy-traffic limit.
    pub rel_tol: f64,
    /// Limit checks apply only at grid points with `ε` at most this value.
    pub limit_max_eps: f64,
    /// Number of batch-means half-widths allowed in statistical comparisons.
    pub ci_widths: f64,
    /// Largest allowed ratio between the extreme lower-bound gap ratios.
    pub gap_band: f64,
    pub ssc_orders: Vec<u32>,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self { rel_tol: 0.1, limit_max_eps: 0.05, ci_widths: 3.0, gap_band: 3.0, ssc_orders: vec![1, 2, 3] }
    }
}

fn default_grid() -> Vec<f64> {
    vec![0.2, 0.1, 0.05, 0.02]
}

fn default_workers() -> usize {
    1
}

fn default_family() -> ArrivalFamily {
    ArrivalFamily::Bernoulli { height: 1 }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub model: ModelSpec,
    #[serde(default = "default_grid")]
    pub eps_grid: Vec<f64>,
    #[serde(default = "default_family")]
    pub arrivals: ArrivalFamily,
    #[serde(default)]
    pub run: RunOverrides,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub verify: VerifySettings,
}

/// A model ready to simulate, with its geometry when it is a switch.
#[derive(Clone, Debug)]
pub enum BuiltModel {
    Switch { channel: ChannelModel, geometry: Box<SwitchGeometry> },
    Jsq { template: LoadBalanceModel, delta: f64 },
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps_grid.is_empty() {
            return Err(Error::InvalidConfig("eps grid is empty".into()));
        }
        if self.eps_grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(Error::InvalidConfig("eps grid values must lie in (0, 1)".into()));
        }
        if self.eps_grid.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig("eps grid must be strictly decreasing".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be >= 1".into()));
        }
        Ok(())
    }

    pub fn is_jsq(&self) -> bool {
        matches!(self.model, ModelSpec::Jsq { .. })
    }

    /// Builds the channel and geometry, or the load-balancing template.
    pub fn build(&self) -> Result<BuiltModel> {
        match &self.model {
            ModelSpec::Switch { states, nu } => {
                let n = nu.len();
                let states = states
                    .iter()
                    .map(|s| {
                        Ok(ChannelState {
                            psi: s.psi,
                            services: ServiceSet::with_projections(n, &s.services)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let channel = ChannelModel::new(states)?;
                let geometry = SwitchGeometry::from_channel(&channel, nu, DEFAULT_FACET_TOL)?;
                Ok(BuiltModel::Switch { channel, geometry: Box::new(geometry) })
            }
            ModelSpec::IqSwitch { ports, nu } => {
                let channel = iq_switch_channel(*ports)?;
                let nu = nu.clone().unwrap_or_else(|| iq_uniform_nu(*ports));
                let geometry =
                    SwitchGeometry::build(&channel, iq_switch_region(*ports)?, &nu, DEFAULT_FACET_TOL)?;
                Ok(BuiltModel::Switch { channel, geometry: Box::new(geometry) })
            }
            ModelSpec::Jsq { servers, delta } => {
                let template = LoadBalanceModel::new(Pmf::point(0)?, servers.clone())?;
                let mu_min = template.mu_min();
                let delta = delta.unwrap_or(mu_min / 2.0);
                if !(delta > 0.0 && delta < mu_min) {
                    return Err(Error::InvalidConfig(format!("delta {delta} outside (0, {mu_min})")));
                }
                if let Some(e) = self.eps_grid.iter().find(|e| **e >= template.mu_sigma()) {
                    return Err(Error::InvalidConfig(format!("eps {e} exceeds total service rate")));
                }
                Ok(BuiltModel::Jsq { template, delta })
            }
        }
    }

    /// Run configuration for grid point `index`.
    pub fn run_config(&self, index: usize) -> RunConfig {
        let eps = self.eps_grid[index];
        let r = &self.run;
        let mut cfg = RunConfig::for_eps(
            eps,
            self.seed_base.wrapping_add(index as u64),
            r.horizon_cap.unwrap_or(DEFAULT_HORIZON_CAP),
        );
        if let Some(v) = r.burn_in {
            cfg.burn_in = v;
        }
        if let Some(v) = r.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = r.batches {
            cfg.batches = v;
        }
        if let Some(v) = &r.moment_orders {
            cfg.moment_orders = v.clone();
        }
        if let Some(v) = r.scheduler {
            cfg.scheduler = v;
        }
        cfg.w = r.w.clone();
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ON_OFF: &str = r#"
        eps_grid = [0.2, 0.1]
        [model]
        kind = "switch"
        nu = [0.8]
        [[model.states]]
        psi = 0.8
        services = [[1]]
        [[model.states]]
        psi = 0.2
        services = [[0]]
    "#;

    #[test]
    fn parses_switch() {
        let cfg = ExperimentConfig::from_toml(ON_OFF).unwrap();
        assert_eq!(cfg.workers, 1);
        assert_eq!(cfg.arrivals, ArrivalFamily::Bernoulli { height: 1 });
        match cfg.build().unwrap() {
            BuiltModel::Switch { geometry, .. } => {
                assert_eq!(geometry.region.facets().len(), 1);
                assert!((geometry.spectrum.sigma_b[(0, 0)] - 0.16).abs() < 1e-12);
            }
            _ => panic!("expected a switch"),
        }
        let rc = cfg.run_config(1);
        assert_eq!(rc.seed, 1);
        assert_eq!(rc.burn_in, 1_000_000);
    }

    #[test]
    fn parses_iq_and_jsq() {
        let cfg = ExperimentConfig::from_toml("[model]\nkind = \"iq-switch\"\nports = 2\n").unwrap();
        assert_eq!(cfg.eps_grid, vec![0.2, 0.1, 0.05, 0.02]);
        assert!(matches!(cfg.build().unwrap(), BuiltModel::Switch { .. }));
        let cfg = ExperimentConfig::from_toml(
            "[model]\nkind = \"jsq\"\nservers = [{ values = [0, 1], probs = [0.5, 0.5] }, { values = [0, 1], probs = [0.5, 0.5] }]\n",
        )
        .unwrap();
        match cfg.build().unwrap() {
            BuiltModel::Jsq { delta, .. } => assert_eq!(delta, 0.25),
            _ => panic!("expected jsq"),
        }
    }

    #[test]
    fn rejects_bad_grids_and_interior_nu() {
        let bad = ON_OFF.replace("[0.2, 0.1]", "[0.1, 0.2]");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = ON_OFF.replace("[0.2, 0.1]", "[1.5]");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let interior = ExperimentConfig::from_toml(&ON_OFF.replace("nu = [0.8]", "nu = [0.5]")).unwrap();
        assert!(interior.build().is_err());
        assert!(ExperimentConfig::from_toml(&format!("bogus = 1\n{ON_OFF}")).is_err());
    }
}
