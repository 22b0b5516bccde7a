use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::config::{BuiltModel, ExperimentConfig};
use super::sweep::{run_sweep, SweepResult};
use crate::error::{Error, Result};
use crate::geometry::validate_capacity_region;

const RATE_IDENTITY_TOL: f64 = 1e-9;
const SHORT_HORIZON: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Geometry,
    Drift,
    Ssc,
    Crp,
    Jsq,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometry" => Ok(Self::Geometry),
            "drift" => Ok(Self::Drift),
            "ssc" => Ok(Self::Ssc),
            "crp" => Ok(Self::Crp),
            "jsq" => Ok(Self::Jsq),
            other => Err(Error::InvalidInput(format!(
                "unknown suite '{other}' (expected geometry, drift, ssc, crp or jsq)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub advisories: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.advisories {
            writeln!(f, "advisory: {a}")?;
        }
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        write!(f, "suite {:?}: {}", self.suite, if self.passed() { "passed" } else { "FAILED" })
    }
}

fn sweep_for(cfg: &ExperimentConfig, report: &mut VerifyReport) -> Result<SweepResult> {
    let short = (0..cfg.eps_grid.len()).any(|i| cfg.run_config(i).horizon < SHORT_HORIZON);
    if short {
        report.advisories.push(format!(
            "horizon below {SHORT_HORIZON} slots; batch-means intervals may be too narrow and checks may fail"
        ));
    }
    let result = run_sweep(cfg)?;
    for p in &result.points {
        if p.record.diverging() {
            report.advisories.push(format!("eps={}: diverging run", p.eps));
        }
    }
    Ok(result)
}

fn require_switch(cfg: &ExperimentConfig, suite: Suite) -> Result<()> {
    if cfg.is_jsq() {
        return Err(Error::InvalidConfig(format!("suite {suite:?} needs a switch model")));
    }
    Ok(())
}

/// Runs one verification suite against the configured model.
pub fn cmd_verify(cfg: &ExperimentConfig, suite: Suite) -> Result<VerifyReport> {
    let mut report = VerifyReport { suite, checks: Vec::new(), advisories: Vec::new() };
    let v = &cfg.verify;
    match suite {
        Suite::Geometry => {
            require_switch(cfg, suite)?;
            let BuiltModel::Switch { channel, geometry } = cfg.build()? else { unreachable!() };
            let val = validate_capacity_region(&geometry.region, &channel, 10_000)?;
            report.check(
                "region",
                val.passed(),
                format!("{} facets against the channel's mixture points", geometry.region.facets().len()),
            );
            report.check(
                "service-rate identity",
                geometry.spectrum.rate_identity_error <= RATE_IDENTITY_TOL,
                format!("max error {:.3e}", geometry.spectrum.rate_identity_error),
            );
            report.check(
                "boundary",
                !geometry.cone.p.is_empty(),
                format!("|P| = {}, |P~| = {}", geometry.cone.p.len(), geometry.cone.p_tilde.len()),
            );
            report.check(
                "delta",
                !geometry.cone.delta.degenerate,
                format!("delta = {:.6}", geometry.cone.delta.delta),
            );
        }
        Suite::Drift => {
            let result = sweep_for(cfg, &mut report)?;
            for p in &result.points {
                let d = &p.record.drift;
                report.check(
                    format!("drift eps={}", p.eps),
                    d.balanced_within(v.ci_widths),
                    format!(
                        "|T1 - (T2 - T3 + T4)| = {:.3e} vs {} x {:.3e}",
                        d.imbalance(),
                        v.ci_widths,
                        d.combined_half_width
                    ),
                );
            }
        }
        Suite::Ssc => {
            let result = sweep_for(cfg, &mut report)?;
            for p in &result.points {
                for &r in &v.ssc_orders {
                    let (Some(k), Some(h)) = (p.record.perp_k_moment(r), p.record.perp_h_moment(r)) else {
                        report.check(format!("ssc eps={} r={r}", p.eps), false, "moment not recorded");
                        continue;
                    };
                    match p.bounds.iter().find(|b| b.r == r) {
                        Some(b) => report.check(
                            format!("ssc eps={} r={r}", p.eps),
                            k.mean <= b.bound.value,
                            format!("E|q_perp|^r = {:.4e} <= bound {:.4e}", k.mean, b.bound.value),
                        ),
                        None => report.check(
                            format!("ssc eps={} r={r}", p.eps),
                            false,
                            "no bound (degenerate delta)",
                        ),
                    }
                    report.check(
                        format!("subspace vs cone eps={} r={r}", p.eps),
                        h.mean <= k.mean + v.ci_widths * h.half_width.max(k.half_width),
                        format!("{:.4e} vs {:.4e}", h.mean, k.mean),
                    );
                }
            }
        }
        Suite::Crp => {
            require_switch(cfg, suite)?;
            let result = sweep_for(cfg, &mut report)?;
            let mut ratios = Vec::new();
            for p in &result.points {
                let (Some(u), Some(g)) = (p.ulb, p.gap) else {
                    return Err(Error::InvalidConfig("crp suite needs exactly one tight facet".into()));
                };
                report.check(
                    format!("lower bound eps={}", p.eps),
                    !g.violation,
                    format!("E<q,c> - ULB = {:.4} (ULB {:.4}), ratio {:.4}", g.gap, u, g.ratio),
                );
                ratios.push(g.ratio);
            }
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            report.check(
                "gap ratio band",
                lo > 0.0 && hi / lo <= v.gap_band,
                format!("ratios in [{lo:.4}, {hi:.4}], band limit {}", v.gap_band),
            );
        }
        Suite::Jsq => {
            if !cfg.is_jsq() {
                return Err(Error::InvalidConfig("suite Jsq needs a jsq model".into()));
            }
            let result = sweep_for(cfg, &mut report)?;
            let mut any = false;
            for p in result.points.iter().filter(|p| p.eps <= v.limit_max_eps) {
                any = true;
                let sim = p.eps * p.record.mean_sum_q.mean;
                let th = p.eps * p.limit;
                report.check(
                    format!("limit eps={}", p.eps),
                    (sim - th).abs() <= v.rel_tol * th,
                    format!("eps E[sum q] = {sim:.4} vs {th:.4}"),
                );
            }
            if !any {
                report.check("limit", false, format!("no grid point with eps <= {}", v.limit_max_eps));
            }
        }
    }
    Ok(report)
}
