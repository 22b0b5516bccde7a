use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::sweep::SweepResult;
use crate::error::Result;
use crate::geometry::{CapacityRegion, DeltaGap, SwitchGeometry, ValidationReport};

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Everything `geometry` prints and stores.
#[derive(Clone, Debug, Serialize)]
pub struct GeometryReport {
    pub region: CapacityRegion,
    pub nu: Vec<f64>,
    pub p: Vec<usize>,
    pub p_tilde: Vec<usize>,
    pub h: Vec<Vec<f64>>,
    pub delta: DeltaGap,
    pub sigma_b: Vec<Vec<f64>>,
    pub b_max: f64,
    pub rate_identity_error: f64,
    pub validation: ValidationReport,
}

impl GeometryReport {
    pub fn new(geometry: &SwitchGeometry, validation: ValidationReport) -> Self {
        Self {
            region: geometry.region.clone(),
            nu: geometry.nu.clone(),
            p: geometry.cone.p.clone(),
            p_tilde: geometry.cone.p_tilde.clone(),
            h: rows(&geometry.cone.h),
            delta: geometry.cone.delta.clone(),
            sigma_b: rows(&geometry.spectrum.sigma_b),
            b_max: geometry.spectrum.b_max,
            rate_identity_error: geometry.spectrum.rate_identity_error,
            validation,
        }
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

impl fmt::Display for GeometryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dimension n = {}", self.region.n())?;
        writeln!(f, "facets ({}):", self.region.facets().len())?;
        for (l, fc) in self.region.facets().iter().enumerate() {
            writeln!(f, "  {l}: c = {}, b = {:.6}", fmt_vec(&fc.c), fc.b)?;
        }
        writeln!(f, "nu = {}", fmt_vec(&self.nu))?;
        writeln!(f, "P = {:?}", self.p)?;
        writeln!(f, "P~ = {:?}", self.p_tilde)?;
        writeln!(f, "H =")?;
        for r in &self.h {
            writeln!(f, "  {}", fmt_vec(r))?;
        }
        writeln!(f, "delta = {:.6} (eps threshold {:.6})", self.delta.delta, self.delta.eps_threshold)?;
        writeln!(f, "Sigma_B =")?;
        for r in &self.sigma_b {
            writeln!(f, "  {}", fmt_vec(r))?;
        }
        writeln!(f, "b_max = {:.6}", self.b_max)?;
        writeln!(f, "service-rate identity error = {:.3e}", self.rate_identity_error)?;
        write!(f, "region validation: {}", if self.validation.passed() { "ok" } else { "FAILED" })
    }
}

/// `sweep.csv`: one row per grid point.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let orders: Vec<u32> = result
        .points
        .first()
        .map(|p| p.record.perp_k.iter().map(|m| m.order).collect())
        .unwrap_or_default();
    let limit_name = if result.jsq { "jsq_limit" } else { "ht_limit" };
    let mut header: Vec<String> = ["eps", "mean_qw", "ci", limit_name, "residual", "T1", "T2", "T3", "T4", "pi_min"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(orders.iter().map(|r| format!("perp_m{r}")));
    header.push("flags".into());
    w.write_record(&header)?;
    let f = |x: f64| format!("{x:.10e}");
    for p in &result.points {
        let r = &p.record;
        let mut row = vec![
            p.eps.to_string(),
            f(r.mean_qw.mean),
            f(r.mean_qw.half_width),
            f(p.limit),
            f(p.residual),
            f(r.drift.t1.mean),
            f(r.drift.t2.mean),
            f(r.drift.t3.mean),
            f(r.drift.t4.mean),
            r.pi_min().map(f).unwrap_or_default(),
        ];
        row.extend(r.perp_k.iter().map(|m| f(m.estimate.mean)));
        row.push(p.flags.join("|"));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `records.csv`: the full per-point simulation record.
pub fn write_records_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = result.points.first() {
        let mut header = vec!["eps".to_string(), "seed".to_string()];
        header.extend(first.record.csv_header());
        w.write_record(&header)?;
    }
    for p in &result.points {
        let mut row = vec![p.eps.to_string(), p.seed.to_string()];
        row.extend(p.record.csv_row());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Header {
    tool: &'static str,
    version: &'static str,
    generated_unix: u64,
}

#[derive(Serialize)]
struct Summary<'a> {
    header: Header,
    result: &'a SweepResult,
}

/// `summary.json`: the sweep with a header carrying the generation time.
/// Everything outside `header` depends only on the config and seeds.
pub fn write_summary_json<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let generated_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let summary = Summary {
        header: Header { tool: "htq", version: env!("CARGO_PKG_VERSION"), generated_unix },
        result,
    };
    serde_json::to_writer_pretty(out, &summary)?;
    Ok(())
}

pub fn write_sweep_outputs(result: &SweepResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_sweep_csv(result, BufWriter::new(File::create(dir.join("sweep.csv"))?))?;
    write_records_csv(result, BufWriter::new(File::create(dir.join("records.csv"))?))?;
    let mut summary = BufWriter::new(File::create(dir.join("summary.json"))?);
    write_summary_json(result, &mut summary)?;
    summary.flush()?;
    Ok(())
}
