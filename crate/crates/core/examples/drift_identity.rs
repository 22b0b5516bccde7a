//! The four drift terms of the projected Lyapunov function on a two-queue
//! switch; T1 balances T2 - T3 + T4 in steady state.

use htq::experiments::{run_sweep, ExperimentConfig};

const CONFIG: &str = r#"
eps_grid = [0.2, 0.1]
seed_base = 31
[model]
kind = "switch"
nu = [0.5, 0.5]
[[model.states]]
psi = 1.0
services = [[1, 0], [0, 1]]
[run]
burn_in = 50000
horizon = 5000000
"#;

fn main() -> htq::Result<()> {
    let result = run_sweep(&ExperimentConfig::from_toml(CONFIG)?)?;
    for p in &result.points {
        let d = &p.record.drift;
        println!("eps = {}", p.eps);
        println!("  T1 = {:.5} +/- {:.5}", d.t1.mean, d.t1.half_width);
        println!("  T2 = {:.5}, T3 = {:.5}, T4 = {:.5}", d.t2.mean, d.t3.mean, d.t4.mean);
        println!("  |T1 - (T2 - T3 + T4)| = {:.2e}, combined half-width {:.2e}", d.imbalance(), d.combined_half_width);
    }
    Ok(())
}
