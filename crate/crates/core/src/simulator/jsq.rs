use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::collector::{Collector, SlotProbe};
use super::{RunConfig, SimRecord};
use crate::error::{Error, Result};
use crate::model::{step_in_place, LoadBalanceModel};
use crate::scheduling::jsq_target;

/// Simulates join-the-shortest-queue routing from an empty system.
///
/// The routing decision uses the queue lengths at the start of the slot.
/// Per slot the random stream is consumed in the order: routing tie-break
/// (only when there is a tie), arrival, then each server's service draw.
/// The collapse subspace is the line spanned by `1`, so `‖q_⊥K‖ = ‖q_⊥H‖`.
pub fn run_jsq(model: &LoadBalanceModel, cfg: &RunConfig) -> Result<SimRecord> {
    cfg.validate()?;
    let n = model.n();
    let w = cfg.w.clone().unwrap_or_else(|| vec![1.0; n]);
    if w.len() != n {
        return Err(Error::InvalidConfig("w has the wrong dimension".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut collector = Collector::new(cfg, n, 0, Vec::new());
    let total = cfg.burn_in + collector.slots();
    let nf = n as f64;

    let mut q = vec![0i64; n];
    let mut q_next = vec![0i64; n];
    let mut a = vec![0i64; n];
    let mut s = vec![0i64; n];
    let mut u = vec![0i64; n];

    for slot in 0..total {
        let target = jsq_target(&q, &mut rng);
        a.iter_mut().for_each(|x| *x = 0);
        a[target] = model.arrival().sample(&mut rng);
        for (si, pmf) in s.iter_mut().zip(model.service()) {
            *si = pmf.sample(&mut rng);
        }
        q_next.copy_from_slice(&q);
        step_in_place(&mut q_next, &a, &s, &mut u);
        for i in 0..n {
            if q_next[i] != q[i] + a[i] - s[i] + u[i] || q_next[i] * u[i] != 0 {
                return Err(Error::NumericalInconsistency(format!(
                    "queue recursion violated at slot {slot}, queue {i}"
                )));
            }
        }
        if slot >= cfg.burn_in {
            let sq = q.iter().sum::<i64>() as f64;
            let sa = a.iter().sum::<i64>() as f64;
            let ss = s.iter().sum::<i64>() as f64;
            let su = u.iter().sum::<i64>() as f64;
            let sqn = q_next.iter().sum::<i64>() as f64;
            let mean = sq / nf;
            let perp = q.iter().map(|x| (*x as f64 - mean).powi(2)).sum::<f64>().sqrt();
            let qw = q.iter().zip(&w).map(|(x, y)| *x as f64 * y).sum();
            let probe = SlotProbe {
                q: &q,
                a: &a,
                s: &s,
                u: &u,
                qw,
                qc: &[],
                drift: [
                    2.0 * sq * (ss - sa) / nf,
                    (sa - ss) * (sa - ss) / nf,
                    su * su / nf,
                    2.0 * sqn * su / nf,
                ],
                perp_k: perp,
                perp_h: perp,
            };
            collector.record(&probe, |_, _| None);
        }
        std::mem::swap(&mut q, &mut q_next);
    }
    collector.finish(cfg.burn_in)
}
