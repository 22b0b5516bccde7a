use serde::{Deserialize, Serialize};

use crate::stats::Estimate;

/// Batch-means estimates of the four drift terms per slot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftEstimates {
    /// `2⟨q_H, s_H − a_H⟩`
    pub t1: Estimate,
    /// `‖a_H − s_H‖²`
    pub t2: Estimate,
    /// `‖u_H‖²`
    pub t3: Estimate,
    /// `2⟨q⁺_H, u_H⟩`
    pub t4: Estimate,
    /// Per-slot `T1 − (T2 − T3 + T4)`.
    pub gap: Estimate,
    /// Root-sum-square of the four half-widths.
    pub combined_half_width: f64,
}

impl DriftEstimates {
    /// `|T̂1 − (T̂2 − T̂3 + T̂4)|`.
    pub fn imbalance(&self) -> f64 {
        (self.t1.mean - (self.t2.mean - self.t3.mean + self.t4.mean)).abs()
    }

    pub fn balanced_within(&self, widths: f64) -> bool {
        self.imbalance() <= widths * self.combined_half_width
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub order: u32,
    pub estimate: Estimate,
}

/// Fraction of slots in channel state `state` in which the chosen schedule
/// attains `b^(m,ℓ)` on facet `facet`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiHat {
    pub state: usize,
    pub facet: usize,
    pub estimate: Estimate,
    pub slots: u64,
}

/// Everything one simulation run measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub slots_used: u64,
    pub burn_in: u64,
    pub mean_qw: Estimate,
    /// `E⟨q, c_ℓ⟩` for each facet tight at `ν`, in the geometry's order.
    pub mean_qc: Vec<Estimate>,
    pub mean_sum_q: Estimate,
    pub mean_q: Vec<f64>,
    pub drift: DriftEstimates,
    /// `E‖q_⊥K‖^r`
    pub perp_k: Vec<MomentEstimate>,
    /// `E‖q_⊥H‖^r`
    pub perp_h: Vec<MomentEstimate>,
    pub pi_hat: Vec<PiHat>,
    /// Per-queue `E[a_i − s_i + u_i]`.
    pub flow_balance: Vec<Estimate>,
    pub warnings: Vec<String>,
}

impl SimRecord {
    pub fn diverging(&self) -> bool {
        self.warnings.iter().any(|w| w.starts_with("diverging"))
    }

    pub fn pi_min(&self) -> Option<f64> {
        self.pi_hat.iter().map(|p| p.estimate.mean).reduce(f64::min)
    }

    pub fn perp_k_moment(&self, order: u32) -> Option<Estimate> {
        self.perp_k.iter().find(|m| m.order == order).map(|m| m.estimate)
    }

    pub fn perp_h_moment(&self, order: u32) -> Option<Estimate> {
        self.perp_h.iter().find(|m| m.order == order).map(|m| m.estimate)
    }

    /// Column names matching [`SimRecord::csv_row`]:
    /// `slots_used, burn_in, mean_qw, mean_qw_ci, mean_sum_q, mean_sum_q_ci,
    /// T1..T4 with their ci, drift_gap, drift_gap_ci, perp_k_m{r}, perp_k_m{r}_ci,
    /// perp_h_m{r}, perp_h_m{r}_ci, pi_min, flow_max_abs, diverging`.
    pub fn csv_header(&self) -> Vec<String> {
        let mut h: Vec<String> =
            ["slots_used", "burn_in", "mean_qw", "mean_qw_ci", "mean_sum_q", "mean_sum_q_ci"]
                .iter()
                .map(|s| s.to_string())
                .collect();
        for t in ["T1", "T2", "T3", "T4", "drift_gap"] {
            h.push(t.into());
            h.push(format!("{t}_ci"));
        }
        for (name, ms) in [("perp_k", &self.perp_k), ("perp_h", &self.perp_h)] {
            for m in ms {
                h.push(format!("{name}_m{}", m.order));
                h.push(format!("{name}_m{}_ci", m.order));
            }
        }
        h.extend(["pi_min", "flow_max_abs", "diverging"].iter().map(|s| s.to_string()));
        h
    }

    pub fn csv_row(&self) -> Vec<String> {
        let f = |x: f64| format!("{x:.10e}");
        let mut r = vec![self.slots_used.to_string(), self.burn_in.to_string()];
        for e in [self.mean_qw, self.mean_sum_q] {
            r.push(f(e.mean));
            r.push(f(e.half_width));
        }
        let d = &self.drift;
        for e in [d.t1, d.t2, d.t3, d.t4, d.gap] {
            r.push(f(e.mean));
            r.push(f(e.half_width));
        }
        for m in self.perp_k.iter().chain(&self.perp_h) {
            r.push(f(m.estimate.mean));
            r.push(f(m.estimate.half_width));
        }
        r.push(self.pi_min().map(f).unwrap_or_default());
        let flow = self.flow_balance.iter().map(|e| e.mean.abs()).fold(0.0, f64::max);
        r.push(f(flow));
        r.push(self.diverging().to_string());
        r
    }
}
