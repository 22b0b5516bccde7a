//! Residual between the simulated weighted queue length and its heavy-traffic
//! value, fitted against a + b log(1/eps) and against c/eps.

use htq::experiments::{run_sweep, ExperimentConfig};

const CONFIG: &str = r#"
eps_grid = [0.2, 0.1, 0.05, 0.02]
seed_base = 41
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
horizon_cap = 20000000
"#;

fn main() -> htq::Result<()> {
    let result = run_sweep(&ExperimentConfig::from_toml(CONFIG)?)?;
    for p in &result.points {
        println!("eps = {:<5} E<q,w> = {:.4}  limit = {:.4}  residual = {:.4}", p.eps, p.record.mean_qw.mean, p.limit, p.residual);
    }
    if let Some(f) = result.fit {
        println!("log model:   {:.4} + {:.4} log(1/eps), SSE {:.3e}", f.a, f.b, f.log_sse);
        println!("1/eps model: {:.5}/eps, SSE {:.3e}", f.inv_eps_coef, f.inv_eps_sse);
        println!("max residual/log(1/eps) = {:.4}", f.max_ratio);
    }
    Ok(())
}
