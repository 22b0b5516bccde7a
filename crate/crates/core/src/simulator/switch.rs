use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::collector::{Collector, SlotProbe};
use super::{RunConfig, Scheduler, SimRecord};
use crate::error::{Error, Result};
use crate::geometry::{dot, ConeScratch, SwitchGeometry};
use crate::model::{step_in_place, SwitchModel};
use crate::scheduling::{maxweight_index, maxweight_matching, MAX_MATCHING_PORTS};

const PI_TOL: f64 = 1e-9;
const W_TOL: f64 = 1e-8;

fn resolve_w(geom: &SwitchGeometry, cfg: &RunConfig) -> Result<Vec<f64>> {
    let w = cfg.w.clone().unwrap_or_else(|| geom.nu.clone());
    if w.len() != geom.nu.len() {
        return Err(Error::InvalidConfig("w has the wrong dimension".into()));
    }
    for (l, f) in geom.tight_facets() {
        let gap = (dot(&f.c, &w) - f.b).abs();
        if gap > W_TOL {
            return Err(Error::InvalidConfig(format!(
                "w is not tight on facet {l}: |<c, w> - b| = {gap:e}"
            )));
        }
    }
    Ok(w)
}

fn matching_ports(model: &SwitchModel) -> Result<usize> {
    let n = model.n();
    let ports = (n as f64).sqrt().round() as usize;
    if ports * ports != n || ports > MAX_MATCHING_PORTS || model.channel().num_states() != 1 {
        return Err(Error::InvalidConfig(
            "matching scheduler needs a single-state N x N input-queued switch".into(),
        ));
    }
    Ok(ports)
}

/// Simulates MaxWeight on a generalized switch from an empty queue.
///
/// Per slot the random stream is consumed in a fixed order: channel state,
/// tie-break (only when there is a tie), then arrivals.
pub fn run_switch(model: &SwitchModel, geom: &SwitchGeometry, cfg: &RunConfig) -> Result<SimRecord> {
    cfg.validate()?;
    let n = model.n();
    if geom.cone.n() != n {
        return Err(Error::InvalidModel("geometry and model dimensions differ".into()));
    }
    let w = resolve_w(geom, cfg)?;
    let ports = match cfg.scheduler {
        Scheduler::Matching => Some(matching_ports(model)?),
        Scheduler::Enumerate => None,
    };
    let channel = model.channel();
    let cone = &geom.cone;
    let b_ml = &geom.spectrum.b_ml;
    let tight: Vec<(usize, Vec<f64>)> = geom.tight_facets().map(|(l, f)| (l, f.c.clone())).collect();
    let pairs: Vec<(usize, usize)> = (0..channel.num_states())
        .flat_map(|m| tight.iter().map(move |(l, _)| (m, *l)))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut collector = Collector::new(cfg, n, tight.len(), pairs);
    let total = cfg.burn_in + collector.slots();

    let mut q = vec![0i64; n];
    let mut q_next = vec![0i64; n];
    let mut a = vec![0i64; n];
    let mut u = vec![0i64; n];
    let mut s_buf = vec![0i64; n];
    let mut ties = Vec::new();
    let mut f = vec![0.0; n];
    let mut q_h = vec![0.0; n];
    let mut a_h = vec![0.0; n];
    let mut s_h = vec![0.0; n];
    let mut u_h = vec![0.0; n];
    let mut qn_h = vec![0.0; n];
    let mut q_par = vec![0.0; n];
    let mut scratch = ConeScratch::default();
    let mut facet_service = vec![0.0; tight.len()];
    let mut qc = vec![0.0; tight.len()];
    let mut s_f = vec![0.0; n];

    for slot in 0..total {
        let m = channel.sample_state(&mut rng);
        let s: &[i64] = match ports {
            None => {
                let services = channel.services(m);
                let (idx, _, _) = maxweight_index(&q, services, &mut rng, &mut ties);
                services.get(idx)
            }
            Some(p) => {
                let mt = maxweight_matching(&q, p);
                s_buf.iter_mut().for_each(|x| *x = 0);
                for (i, j) in mt.perm.iter().enumerate() {
                    s_buf[i * p + j] = 1;
                }
                &s_buf
            }
        };
        model.arrival().sample_into(&mut rng, &mut a);
        q_next.copy_from_slice(&q);
        step_in_place(&mut q_next, &a, s, &mut u);
        for i in 0..n {
            if q_next[i] != q[i] + a[i] - s[i] + u[i] || q_next[i] * u[i] != 0 {
                return Err(Error::NumericalInconsistency(format!(
                    "queue recursion violated at slot {slot}, queue {i}"
                )));
            }
        }

        if slot >= cfg.burn_in {
            let mut proj = |x: &[i64], out: &mut [f64]| {
                for (fi, xi) in f.iter_mut().zip(x) {
                    *fi = *xi as f64;
                }
                cone.project_h_into(&f, out);
            };
            proj(&q, &mut q_h);
            proj(&a, &mut a_h);
            proj(s, &mut s_h);
            proj(&u, &mut u_h);
            proj(&q_next, &mut qn_h);
            let mut t1 = 0.0;
            let mut t2 = 0.0;
            let mut t3 = 0.0;
            let mut t4 = 0.0;
            for i in 0..n {
                t1 += 2.0 * q_h[i] * (s_h[i] - a_h[i]);
                t2 += (a_h[i] - s_h[i]) * (a_h[i] - s_h[i]);
                t3 += u_h[i] * u_h[i];
                t4 += 2.0 * qn_h[i] * u_h[i];
            }
            for (fi, qi) in f.iter_mut().zip(&q) {
                *fi = *qi as f64;
            }
            let perp_h = f.iter().zip(&q_h).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            cone.projector.project_into(&f, &mut q_par, &mut scratch)?;
            let perp_k = f.iter().zip(&q_par).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            let qw: f64 = q.iter().zip(&w).map(|(x, y)| *x as f64 * y).sum();
            for (x, si) in s_f.iter_mut().zip(s) {
                *x = *si as f64;
            }
            for (k, (_, c)) in tight.iter().enumerate() {
                facet_service[k] = dot(c, &s_f);
                qc[k] = dot(c, &f);
            }
            let probe = SlotProbe {
                q: &q,
                a: &a,
                s,
                u: &u,
                qw,
                qc: &qc,
                drift: [t1, t2, t3, t4],
                perp_k,
                perp_h,
            };
            collector.record(&probe, |mm, l| {
                if mm != m {
                    return None;
                }
                let k = tight.iter().position(|(ll, _)| *ll == l)?;
                Some((facet_service[k] - b_ml[(m, l)]).abs() <= PI_TOL)
            });
        }
        std::mem::swap(&mut q, &mut q_next);
    }
    collector.finish(cfg.burn_in)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ArrivalModel, ChannelModel, ChannelState, Pmf, ServiceSet};

    fn on_off(p: f64) -> (SwitchModel, SwitchGeometry) {
        let on = ServiceSet::with_projections(1, &[vec![1]]).unwrap();
        let off = ServiceSet::new(1, &[vec![0]]).unwrap();
        let ch = ChannelModel::new(vec![
            ChannelState { psi: 0.8, services: on },
            ChannelState { psi: 0.2, services: off },
        ])
        .unwrap();
        let geom = SwitchGeometry::from_channel(&ch, &[0.8], 1e-9).unwrap();
        let model =
            SwitchModel::new(ArrivalModel::Independent(vec![Pmf::bernoulli(p).unwrap()]), ch).unwrap();
        (model, geom)
    }

    fn short(seed: u64) -> RunConfig {
        RunConfig { burn_in: 1_000, horizon: 200_000, batches: 20, seed, ..RunConfig::default() }
    }

    #[test]
    fn deterministic_for_seed() {
        let (m, g) = on_off(0.6);
        let a = run_switch(&m, &g, &short(7)).unwrap();
        let b = run_switch(&m, &g, &short(7)).unwrap();
        assert_eq!(a, b);
        let c = run_switch(&m, &g, &short(8)).unwrap();
        assert_ne!(a.mean_qw, c.mean_qw);
    }

    #[test]
    fn flow_balance_and_drift_identity() {
        let (m, g) = on_off(0.6);
        let r = run_switch(&m, &g, &short(1)).unwrap();
        for e in &r.flow_balance {
            assert!(e.mean.abs() < 0.01, "{e:?}");
        }
        assert!(r.drift.balanced_within(3.0), "{:?}", r.drift);
        assert!(r.drift.gap.mean.abs() < 1e-3);
        assert!(!r.diverging());
        assert_eq!(r.slots_used, 200_000);
    }

    #[test]
    fn pi_hat_in_unit_interval() {
        let (m, g) = on_off(0.6);
        let r = run_switch(&m, &g, &short(2)).unwrap();
        assert_eq!(r.pi_hat.len(), 2);
        for p in &r.pi_hat {
            assert!((0.0..=1.0).contains(&p.estimate.mean));
        }
        // in the off state b^(m,l) = 0 is always attained
        let off = r.pi_hat.iter().find(|p| p.state == 1).unwrap();
        assert_eq!(off.estimate.mean, 1.0);
    }

    #[test]
    fn rejects_w_off_face() {
        let (m, g) = on_off(0.6);
        let cfg = RunConfig { w: Some(vec![0.5]), ..short(0) };
        assert!(matches!(run_switch(&m, &g, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn overloaded_run_flags_divergence() {
        let (m, g) = on_off(0.95);
        let r = run_switch(&m, &g, &short(3)).unwrap();
        assert!(r.diverging());
    }
}
