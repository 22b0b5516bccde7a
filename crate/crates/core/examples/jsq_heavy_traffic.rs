//! Join-the-shortest-queue with two Bernoulli servers: total queue length
//! against its heavy-traffic value and the collapse onto the diagonal.

use htq::experiments::{run_sweep, ExperimentConfig};

const CONFIG: &str = r#"
eps_grid = [0.2, 0.1, 0.05]
seed_base = 51
[model]
kind = "jsq"
servers = [{ values = [0, 1], probs = [0.5, 0.5] }, { values = [0, 1], probs = [0.5, 0.5] }]
[run]
horizon_cap = 20000000
"#;

fn main() -> htq::Result<()> {
    let result = run_sweep(&ExperimentConfig::from_toml(CONFIG)?)?;
    for p in &result.points {
        let perp = p.record.perp_k_moment(1).map(|e| e.mean).unwrap_or(f64::NAN);
        let bound = p.bounds.first().map(|b| b.bound.value).unwrap_or(f64::NAN);
        println!(
            "eps = {:<5} eps E[sum q] = {:.4}  eps limit = {:.4}  E|q_perp| = {:.4} (bound {:.1})",
            p.eps,
            p.eps * p.record.mean_sum_q.mean,
            p.eps * p.limit,
            perp,
            bound
        );
    }
    Ok(())
}
