//! Maximum-weight perfect matching on a square integer matrix (the
//! assignment problem), O(N³) shortest augmenting paths with potentials.

use serde::Serialize;

/// Port limit for the assignment solver.
pub const MAX_MATCHING_PORTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    /// `perm[i]` is the output matched to input `i`.
    pub perm: Vec<usize>,
    pub weight: i64,
}

/// Max-weight perfect matching of the `ports × ports` matrix `weights`
/// (row-major). Ties are resolved by solver order, so the result is a
/// deterministic function of the input.
pub fn maxweight_matching(weights: &[i64], ports: usize) -> Matching {
    assert!((1..=MAX_MATCHING_PORTS).contains(&ports), "unsupported port count {ports}");
    assert_eq!(weights.len(), ports * ports, "weight matrix must be ports x ports");
    let n = ports;
    let cost = |i: usize, j: usize| -weights[i * n + j];
    // 1-based arrays with a virtual column 0
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[col_owner[j] - 1] = j - 1;
    }
    let weight = perm.iter().enumerate().map(|(i, &j)| weights[i * n + j]).sum();
    Matching { perm, weight }
}

/// Flattened permutation matrix for a matching.
pub fn permutation_to_service(perm: &[usize]) -> Vec<i64> {
    let n = perm.len();
    let mut s = vec![0; n * n];
    for (i, &j) in perm.iter().enumerate() {
        s[i * n + j] = 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(w: &[i64], n: usize) -> i64 {
        fn rec(w: &[i64], n: usize, row: usize, used: &mut [bool]) -> i64 {
            if row == n {
                return 0;
            }
            let mut best = i64::MIN;
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    best = best.max(w[row * n + j] + rec(w, n, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(w, n, 0, &mut vec![false; n])
    }

    #[test]
    fn two_by_two() {
        let m = maxweight_matching(&[5, 1, 2, 4], 2);
        assert_eq!(m.perm, vec![0, 1]);
        assert_eq!(m.weight, 9);
        assert_eq!(permutation_to_service(&m.perm), vec![1, 0, 0, 1]);
    }

    #[test]
    fn all_zero() {
        let m = maxweight_matching(&[0; 9], 3);
        assert_eq!(m.weight, 0);
        let mut sorted = m.perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 2..=5 {
            for _ in 0..200 {
                let w: Vec<i64> = (0..n * n).map(|_| rng.random_range(0..50)).collect();
                assert_eq!(maxweight_matching(&w, n).weight, brute_force(&w, n));
            }
        }
    }
}
