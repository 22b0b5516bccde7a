//! Discrete-time generalized switch and load-balancing models.

mod arrival;
mod channel;
mod dynamics;
mod iq;

pub use arrival::{
    sample_arrivals, scale_to_heavy_traffic, ArrivalDraw, ArrivalFamily, ArrivalModel,
    HeavyTrafficTarget, JointPmf, Pmf, ScaledArrivals,
};
pub use channel::{ChannelModel, ChannelState, ServiceSet};
pub use dynamics::{step, step_in_place, StepOutcome, SystemState};
pub use iq::{iq_switch_channel, iq_switch_region, iq_uniform_nu, make_iq_switch, MAX_IQ_PORTS};

use crate::error::{Error, Result};

/// A generalized switch: `n` queues fed by per-queue arrivals and served by a
/// channel-state-dependent service set.
#[derive(Clone, Debug)]
pub struct SwitchModel {
    n: usize,
    arrival: ArrivalModel,
    channel: ChannelModel,
}

impl SwitchModel {
    pub fn new(arrival: ArrivalModel, channel: ChannelModel) -> Result<Self> {
        let n = channel.n();
        match &arrival {
            ArrivalModel::Stream(_) => {
                return Err(Error::InvalidModel(
                    "a generalized switch needs per-queue arrivals, not a single stream".into(),
                ))
            }
            other if other.dim() != n => {
                return Err(Error::InvalidModel(format!(
                    "arrival dimension {} does not match {} queues",
                    other.dim(),
                    n
                )))
            }
            _ => {}
        }
        Ok(Self { n, arrival, channel })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arrival(&self) -> &ArrivalModel {
        &self.arrival
    }

    pub fn channel(&self) -> &ChannelModel {
        &self.channel
    }

    /// Same channel, different arrivals (used when sweeping the heavy-traffic parameter).
    pub fn with_arrival(&self, arrival: ArrivalModel) -> Result<Self> {
        Self::new(arrival, self.channel.clone())
    }

    /// `max{A_max, S_max}`.
    pub fn alpha(&self) -> f64 {
        self.arrival.a_max().max(self.channel.s_max()) as f64
    }
}

/// `n` parallel servers fed by a single arrival stream through a dispatcher.
#[derive(Clone, Debug)]
pub struct LoadBalanceModel {
    arrival: Pmf,
    service: Vec<Pmf>,
}

impl LoadBalanceModel {
    pub fn new(arrival: Pmf, service: Vec<Pmf>) -> Result<Self> {
        if service.is_empty() {
            return Err(Error::InvalidModel("load balancer needs at least one server".into()));
        }
        if let Some(i) = service.iter().position(|s| s.mean() <= 0.0) {
            return Err(Error::InvalidModel(format!("server {i} has zero mean service")));
        }
        Ok(Self { arrival, service })
    }

    pub fn n(&self) -> usize {
        self.service.len()
    }

    pub fn arrival(&self) -> &Pmf {
        &self.arrival
    }

    pub fn service(&self) -> &[Pmf] {
        &self.service
    }

    pub fn with_arrival(&self, arrival: Pmf) -> Result<Self> {
        Self::new(arrival, self.service.clone())
    }

    pub fn mu(&self) -> Vec<f64> {
        self.service.iter().map(Pmf::mean).collect()
    }

    pub fn mu_sigma(&self) -> f64 {
        self.service.iter().map(Pmf::mean).sum()
    }

    pub fn mu_min(&self) -> f64 {
        self.service.iter().map(Pmf::mean).fold(f64::INFINITY, f64::min)
    }

    pub fn service_variances(&self) -> Vec<f64> {
        self.service.iter().map(Pmf::variance).collect()
    }

    pub fn s_max(&self) -> i64 {
        self.service.iter().map(Pmf::max).max().unwrap_or(0)
    }

    pub fn alpha(&self) -> f64 {
        self.arrival.max().max(self.s_max()) as f64
    }
}
