use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use htq::experiments::{cmd_geometry, cmd_jsq_sweep, cmd_sweep, cmd_verify, ExperimentConfig, Suite, SweepResult};

#[derive(Parser)]
#[command(name = "htq", version, about = "Heavy-traffic experiments for MaxWeight switches and JSQ")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed base.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's worker count.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build and validate the capacity region and print the cone geometry.
    Geometry(Common),
    /// Heavy-traffic sweep of a switch model.
    Sweep(Common),
    /// Heavy-traffic sweep of a JSQ load balancer.
    JsqSweep(Common),
    /// Run a verification suite: geometry, drift, ssc, crp or jsq.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: String,
    },
}

fn load(c: &Common) -> htq::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    if let Some(s) = c.seed {
        cfg.seed_base = s;
    }
    if let Some(o) = &c.out {
        cfg.out_dir = o.clone();
    }
    if let Some(w) = c.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_sweep(r: &SweepResult) {
    println!("{:>8} {:>14} {:>12} {:>14} {:>12}  flags", "eps", "mean_qw", "ci", "limit", "residual");
    for p in &r.points {
        println!(
            "{:>8} {:>14.6} {:>12.6} {:>14.6} {:>12.6}  {}",
            p.eps,
            p.record.mean_qw.mean,
            p.record.mean_qw.half_width,
            p.limit,
            p.residual,
            p.flags.join("|")
        );
    }
    if let Some(f) = &r.fit {
        println!(
            "residual ~ {:.4} + {:.4} log(1/eps): sse {:.4e}; residual ~ {:.4}/eps: sse {:.4e}; max ratio {:.4}",
            f.a, f.b, f.log_sse, f.inv_eps_coef, f.inv_eps_sse, f.max_ratio
        );
    }
}

fn run(cli: Cli) -> htq::Result<bool> {
    match cli.command {
        Command::Geometry(c) => {
            let cfg = load(&c)?;
            let report = cmd_geometry(&cfg, Some(&cfg.out_dir))?;
            println!("{report}");
            Ok(true)
        }
        Command::Sweep(c) => {
            let cfg = load(&c)?;
            let r = cmd_sweep(&cfg, Some(&cfg.out_dir))?;
            print_sweep(&r);
            Ok(true)
        }
        Command::JsqSweep(c) => {
            let cfg = load(&c)?;
            let r = cmd_jsq_sweep(&cfg, Some(&cfg.out_dir))?;
            print_sweep(&r);
            Ok(true)
        }
        Command::Verify { common, suite } => {
            let suite: Suite = suite.parse()?;
            let cfg = load(&common)?;
            let report = cmd_verify(&cfg, suite)?;
            println!("{report}");
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
