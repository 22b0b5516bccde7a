//! Single-facet case: MaxWeight against the lower bound that holds for any
//! scheduler, with the gap normalized by log(1/eps).

use htq::experiments::{run_sweep, ExperimentConfig};

const CONFIG: &str = r#"
eps_grid = [0.2, 0.1, 0.05]
seed_base = 21
[model]
kind = "switch"
nu = [0.8]
[[model.states]]
psi = 0.8
services = [[1]]
[[model.states]]
psi = 0.2
services = [[0]]
[run]
burn_in = 50000
horizon = 5000000
"#;

fn main() -> htq::Result<()> {
    let result = run_sweep(&ExperimentConfig::from_toml(CONFIG)?)?;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "eps", "E<q,c>", "ULB", "gap", "gap/log");
    for p in &result.points {
        let (Some(u), Some(g)) = (p.ulb, p.gap) else { continue };
        println!(
            "{:>6} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            p.eps, p.record.mean_qc[0].mean, u, g.gap, g.ratio
        );
    }
    Ok(())
}
