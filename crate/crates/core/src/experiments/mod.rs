//! Config-driven sweeps, verification suites and file outputs behind the
//! `htq` command-line tool.

mod config;
mod output;
mod sweep;
mod verify;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

pub use config::{BuiltModel, ExperimentConfig, ModelSpec, RunOverrides, StateSpec, VerifySettings};
pub use output::{
    write_records_csv, write_summary_json, write_sweep_csv, write_sweep_outputs, GeometryReport,
};
pub use sweep::{run_sweep, SweepPoint, SweepResult};
pub use verify::{cmd_verify, Check, Suite, VerifyReport};

use crate::error::{Error, Result};
use crate::geometry::validate_capacity_region;

/// Builds and validates the switch geometry; writes `facets.csv` to `out`.
pub fn cmd_geometry(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<GeometryReport> {
    let BuiltModel::Switch { channel, geometry } = cfg.build()? else {
        return Err(Error::Unsupported("geometry needs a switch model".into()));
    };
    let validation = validate_capacity_region(&geometry.region, &channel, 10_000)?;
    let report = GeometryReport::new(&geometry, validation.clone());
    validation.into_result()?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        geometry.region.write_csv(BufWriter::new(File::create(dir.join("facets.csv"))?))?;
    }
    Ok(report)
}

/// Heavy-traffic sweep of a switch model; writes the sweep files to `out`.
pub fn cmd_sweep(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<SweepResult> {
    if cfg.is_jsq() {
        return Err(Error::InvalidConfig("sweep needs a switch model; use jsq-sweep".into()));
    }
    sweep_and_write(cfg, out)
}

/// Heavy-traffic sweep of a JSQ model; writes the sweep files to `out`.
pub fn cmd_jsq_sweep(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<SweepResult> {
    if !cfg.is_jsq() {
        return Err(Error::InvalidConfig("jsq-sweep needs a jsq model".into()));
    }
    sweep_and_write(cfg, out)
}

fn sweep_and_write(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<SweepResult> {
    let result = run_sweep(cfg)?;
    if let Some(dir) = out {
        write_sweep_outputs(&result, dir)?;
    }
    Ok(result)
}
