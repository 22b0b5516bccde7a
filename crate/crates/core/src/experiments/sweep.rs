use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BuiltModel, ExperimentConfig};
use crate::error::{Error, Result};
use crate::model::{scale_to_heavy_traffic, ArrivalModel, HeavyTrafficTarget, SwitchModel};
use crate::simulator::{run_jsq, run_switch, SimRecord};
use crate::theory::{
    bound_table, crp_gap_bound, fit_log_error, ht_limit, jsq_limit, ssc_bound_jsq, ssc_bound_rr, ulb,
    GapReport, LogFit, MomentBound, TheoryPoint, TheoryReport,
};

/// Results for one heavy-traffic parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub eps: f64,
    pub seed: u64,
    /// `ht_limit` for a switch, `jsq_limit` for load balancing.
    pub limit: f64,
    /// `|Ê⟨q, w⟩ − limit|`.
    pub residual: f64,
    pub ulb: Option<f64>,
    pub gap: Option<GapReport>,
    pub bounds: Vec<MomentBound>,
    pub record: SimRecord,
    pub flags: Vec<String>,
}

impl SweepPoint {
    /// `(1 − π̂)/ε` for every recorded (state, facet) pair.
    pub fn pi_deficits(&self) -> Vec<f64> {
        self.record.pi_hat.iter().map(|p| (1.0 - p.estimate.mean) / self.eps).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub name: String,
    pub jsq: bool,
    pub points: Vec<SweepPoint>,
    pub fit: Option<LogFit>,
    pub theory: TheoryReport,
    pub flags: Vec<String>,
}

impl SweepResult {
    pub fn point(&self, eps: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.eps == eps)
    }
}

fn point_flags(p: &SweepPoint, ci_widths: f64) -> Vec<String> {
    let mut flags = Vec::new();
    if p.record.diverging() {
        flags.push("diverging".to_string());
    }
    if !p.record.drift.balanced_within(ci_widths) {
        flags.push("drift".to_string());
    }
    for b in &p.bounds {
        if let Some(m) = p.record.perp_k_moment(b.r) {
            if m.mean > b.bound.value {
                flags.push(format!("ssc_r{}", b.r));
            }
        }
    }
    if p.gap.is_some_and(|g| g.violation) {
        flags.push("ulb".to_string());
    }
    flags
}

fn simulate_point(cfg: &ExperimentConfig, built: &BuiltModel, index: usize) -> Result<SweepPoint> {
    let eps = cfg.eps_grid[index];
    let rc = cfg.run_config(index);
    let (record, limit, ulb_value, bounds) = match built {
        BuiltModel::Switch { channel, geometry } => {
            let target = HeavyTrafficTarget::Switch { nu: geometry.nu.clone() };
            let scaled = scale_to_heavy_traffic(&cfg.arrivals, &target, eps)?;
            let model = SwitchModel::new(scaled.model, channel.clone())?;
            let record = run_switch(&model, geometry, &rc)?;
            let cone = &geometry.cone;
            let spec = &geometry.spectrum;
            let limit = ht_limit(&cone.h, &scaled.covariance, &cone.gram_inv, &spec.sigma_b, eps)?;
            let ulb_value = if cone.p.len() == 1 {
                let f = &geometry.region.facets()[cone.p[0]];
                Some(ulb(&f.c, f.b, &scaled.covariance, spec.sigma_b[(0, 0)], spec.b_max, eps)?)
            } else {
                None
            };
            let bounds = if cone.delta.degenerate {
                Vec::new()
            } else {
                bound_table(ssc_bound_rr, model.n(), model.alpha(), cone.delta.delta, &rc.moment_orders)?
            };
            (record, limit, ulb_value, bounds)
        }
        BuiltModel::Jsq { template, delta } => {
            let target = HeavyTrafficTarget::LoadBalance { mu_sigma: template.mu_sigma() };
            let scaled = scale_to_heavy_traffic(&cfg.arrivals, &target, eps)?;
            let ArrivalModel::Stream(stream) = scaled.model else {
                return Err(Error::ModelInconsistency("load balancing needs a scalar stream".into()));
            };
            let model = template.with_arrival(stream)?;
            let record = run_jsq(&model, &rc)?;
            let limit = jsq_limit(model.arrival().variance(), &model.service_variances(), eps)?;
            let bounds = bound_table(ssc_bound_jsq, model.n(), model.alpha(), *delta, &rc.moment_orders)?;
            (record, limit, None, bounds)
        }
    };
    let gap = ulb_value.and_then(|u| {
        record.mean_qc.first().map(|m| crp_gap_bound(u, m.mean, m.half_width, eps))
    });
    let mut point = SweepPoint {
        index,
        eps,
        seed: rc.seed,
        limit,
        residual: (record.mean_qw.mean - limit).abs(),
        ulb: ulb_value,
        gap,
        bounds,
        record,
        flags: Vec::new(),
    };
    point.flags = point_flags(&point, cfg.verify.ci_widths);
    Ok(point)
}

/// Runs every grid point on a pool of `cfg.workers` threads. Each point uses
/// seed `seed_base + index`; results come back in grid order regardless of
/// scheduling, so concurrent and sequential sweeps agree exactly.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let built = cfg.build()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let points: Vec<SweepPoint> = pool.install(|| {
        (0..cfg.eps_grid.len())
            .into_par_iter()
            .map(|i| simulate_point(cfg, &built, i))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut flags = Vec::new();
    let fit = if points.len() >= 3 {
        let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.eps, p.residual)).collect();
        match fit_log_error(&pts) {
            Ok(f) => Some(f),
            Err(e) => {
                flags.push(format!("fit: {e}"));
                None
            }
        }
    } else {
        None
    };
    for p in &points {
        for f in &p.flags {
            flags.push(format!("eps={}: {f}", p.eps));
        }
    }
    let b_max = match &built {
        BuiltModel::Switch { geometry, .. } => Some(geometry.spectrum.b_max),
        BuiltModel::Jsq { .. } => None,
    };
    let theory = TheoryReport {
        points: points
            .iter()
            .map(|p| TheoryPoint { eps: p.eps, limit: p.limit, ulb: p.ulb, bounds: p.bounds.clone() })
            .collect(),
        b_max,
        fit,
    };
    theory.check_invariants()?;
    Ok(SweepResult { name: cfg.name.clone(), jsq: cfg.is_jsq(), points, fit, theory, flags })
}
