//! Runs a config file end to end and writes sweep.csv, records.csv and
//! summary.json, as the `htq sweep` command does.
//!
//! cargo run --release --example sweep_to_files -- configs/quick.toml out/quick

use std::path::PathBuf;

use htq::experiments::{cmd_geometry, cmd_sweep, ExperimentConfig};

fn main() -> htq::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = PathBuf::from(args.next().unwrap_or_else(|| "configs/quick.toml".into()));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out/quick".into()));
    let cfg = ExperimentConfig::load(&config)?;
    println!("{}", cmd_geometry(&cfg, Some(&out))?);
    let result = cmd_sweep(&cfg, Some(&out))?;
    println!("{} grid points written to {}", result.points.len(), out.display());
    Ok(())
}
