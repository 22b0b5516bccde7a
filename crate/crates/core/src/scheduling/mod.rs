//! MaxWeight scheduling and join-the-shortest-queue routing.

mod hungarian;

use std::ops::{Add, Mul};

use rand::Rng;
use serde::Serialize;

pub use hungarian::{maxweight_matching, permutation_to_service, Matching, MAX_MATCHING_PORTS};

use crate::model::ServiceSet;

/// Scalar type usable as a queue weight.
pub trait Weight: Copy + PartialOrd + Add<Output = Self> + Mul<Output = Self> + From<i32> {}

impl<T> Weight for T where T: Copy + PartialOrd + Add<Output = T> + Mul<Output = T> + From<i32> {}

/// A MaxWeight choice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleDecision<W> {
    /// Position of the chosen vector in the service set.
    pub index: usize,
    pub s: Vec<i64>,
    pub weight: W,
    /// Number of maximizers the choice was drawn from.
    pub tie_count: usize,
}

/// Picks a uniformly random element of `argmax_{x ∈ S} ⟨q, x⟩`.
pub fn maxweight<W: Weight, R: Rng + ?Sized>(
    q: &[W],
    services: &ServiceSet,
    rng: &mut R,
) -> ScheduleDecision<W> {
    let mut ties = Vec::new();
    let (index, weight, tie_count) = maxweight_index(q, services, rng, &mut ties);
    ScheduleDecision { index, s: services.get(index).to_vec(), weight, tie_count }
}

/// Allocation-free core of [`maxweight`]: returns `(index, weight, tie_count)`.
/// `ties` is scratch space. One uniform draw is consumed only when there is a tie.
#[inline]
pub fn maxweight_index<W: Weight, R: Rng + ?Sized>(
    q: &[W],
    services: &ServiceSet,
    rng: &mut R,
    ties: &mut Vec<usize>,
) -> (usize, W, usize) {
    assert!(!services.is_empty(), "maxweight over an empty service set");
    ties.clear();
    let mut best: Option<W> = None;
    for (idx, x) in services.iter().enumerate() {
        let mut w = W::from(0);
        for (qi, xi) in q.iter().zip(x) {
            if *xi != 0 {
                w = w + *qi * W::from(*xi as i32);
            }
        }
        match best {
            Some(b) if w < b => {}
            Some(b) if w == b => ties.push(idx),
            _ => {
                best = Some(w);
                ties.clear();
                ties.push(idx);
            }
        }
    }
    let pick = if ties.len() > 1 { ties[rng.random_range(0..ties.len())] } else { ties[0] };
    (pick, best.expect("nonempty"), ties.len())
}

/// Index of a shortest queue, ties broken uniformly at random.
#[inline]
pub fn jsq_target<R: Rng + ?Sized>(q: &[i64], rng: &mut R) -> usize {
    let min = *q.iter().min().expect("at least one queue");
    let count = q.iter().filter(|v| **v == min).count();
    let nth = if count > 1 { rng.random_range(0..count) } else { 0 };
    q.iter()
        .enumerate()
        .filter(|(_, v)| **v == min)
        .nth(nth)
        .map(|(i, _)| i)
        .expect("nth minimum exists")
}

/// Sends the whole batch `a` to one shortest queue.
pub fn jsq_route<R: Rng + ?Sized>(q: &[i64], a: i64, rng: &mut R) -> Vec<i64> {
    assert!(a >= 0, "negative arrival count");
    let mut out = vec![0; q.len()];
    let target = jsq_target(q, rng);
    out[target] = a;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_pair() -> ServiceSet {
        ServiceSet::new(2, &[vec![1, 0], vec![0, 1]]).unwrap()
    }

    #[test]
    fn picks_heavier_queue() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = maxweight(&[3i64, 1], &unit_pair(), &mut rng);
        assert_eq!(d.s, vec![1, 0]);
        assert_eq!(d.weight, 3);
        assert_eq!(d.tie_count, 1);
    }

    #[test]
    fn ties_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let set = unit_pair();
        let n = 10_000;
        let first = (0..n).filter(|_| maxweight(&[2i64, 2], &set, &mut rng).index == 0).count();
        let freq = first as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.02, "{freq}");
    }

    #[test]
    fn zero_queues_tie_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let set = ServiceSet::with_projections(2, &[vec![1, 1]]).unwrap();
        let mut counts = [0usize; 4];
        for _ in 0..8000 {
            let d = maxweight(&[0i64, 0], &set, &mut rng);
            assert_eq!(d.tie_count, 4);
            counts[d.index] += 1;
        }
        assert!(counts.iter().all(|c| (*c as f64 / 8000.0 - 0.25).abs() < 0.03), "{counts:?}");
    }

    #[test]
    fn jsq_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(jsq_route(&[3, 1, 2], 4, &mut rng), vec![0, 4, 0]);
        assert_eq!(jsq_route(&[3, 1, 2], 0, &mut rng), vec![0, 0, 0]);
        let n = 10_000;
        let first = (0..n).filter(|_| jsq_route(&[1, 1], 2, &mut rng)[0] == 2).count();
        assert!((first as f64 / n as f64 - 0.5).abs() < 0.02);
    }

    fn service_sets() -> impl Strategy<Value = ServiceSet> {
        (1usize..5).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(0i64..4, n), 1..30)
                .prop_map(move |v| ServiceSet::new(n, &v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn argmax_matches_linear_scan(set in service_sets(), seed in any::<u64>(), qs in proptest::collection::vec(0i64..20, 4)) {
            let q = &qs[..set.n()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = maxweight(q, &set, &mut rng);
            let best = set.iter().map(|x| x.iter().zip(q).map(|(a, b)| a * b).sum::<i64>()).max().unwrap();
            prop_assert_eq!(d.weight, best);
            prop_assert!(set.contains(&d.s));
        }

        #[test]
        fn argmax_is_scale_invariant(set in service_sets(), seed in any::<u64>(), qs in proptest::collection::vec(0i64..20, 4), shift in -6i32..6) {
            let q: Vec<f64> = qs[..set.n()].iter().map(|v| *v as f64).collect();
            let gamma = 2f64.powi(shift);
            let scaled: Vec<f64> = q.iter().map(|v| v * gamma).collect();
            let mut r1 = ChaCha8Rng::seed_from_u64(seed);
            let mut r2 = ChaCha8Rng::seed_from_u64(seed);
            let mut t1 = Vec::new();
            let mut t2 = Vec::new();
            let a = maxweight_index(&q, &set, &mut r1, &mut t1);
            let b = maxweight_index(&scaled, &set, &mut r2, &mut t2);
            prop_assert_eq!(&t1, &t2);
            prop_assert_eq!(a.0, b.0);
        }

        #[test]
        fn jsq_never_picks_longer_queue(q in proptest::collection::vec(0i64..6, 1..6), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = jsq_target(&q, &mut rng);
            prop_assert_eq!(q[t], *q.iter().min().unwrap());
        }
    }
}
