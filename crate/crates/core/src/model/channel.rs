use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// A finite set of nonnegative integer service vectors, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServiceSet {
    n: usize,
    data: Vec<i64>,
}

impl ServiceSet {
    /// Takes the vectors as given (duplicates dropped, first occurrence wins).
    pub fn new(n: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("service vectors must have positive length".into()));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidModel("service set is empty".into()));
        }
        let mut seen = HashSet::new();
        let mut data = Vec::with_capacity(vectors.len() * n);
        for v in vectors {
            if v.len() != n {
                return Err(Error::InvalidModel(format!(
                    "service vector {v:?} does not have length {n}"
                )));
            }
            if v.iter().any(|x| *x < 0) {
                return Err(Error::InvalidModel(format!("service vector {v:?} is negative")));
            }
            if seen.insert(v.clone()) {
                data.extend_from_slice(v);
            }
        }
        Ok(Self { n, data })
    }

    /// Adds every coordinate-axis projection (any subset of entries zeroed).
    /// Original vectors keep their order; new ones follow in discovery order.
    pub fn with_projections(n: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        let mut all: Vec<Vec<i64>> = Vec::new();
        let mut seen = HashSet::new();
        for v in vectors {
            if seen.insert(v.clone()) {
                all.push(v.clone());
            }
        }
        let mut cursor = 0;
        while cursor < all.len() {
            let v = all[cursor].clone();
            for i in 0..v.len() {
                if v[i] != 0 {
                    let mut w = v.clone();
                    w[i] = 0;
                    if seen.insert(w.clone()) {
                        all.push(w);
                    }
                }
            }
            cursor += 1;
        }
        Self::new(n, &all)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, idx: usize) -> &[i64] {
        &self.data[idx * self.n..(idx + 1) * self.n]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[i64]> + '_ {
        self.data.chunks_exact(self.n)
    }

    pub fn to_vecs(&self) -> Vec<Vec<i64>> {
        self.iter().map(<[i64]>::to_vec).collect()
    }

    pub fn s_max(&self) -> i64 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.iter().any(|v| v == x)
    }

    pub fn is_projection_closed(&self) -> bool {
        self.iter().all(|v| {
            (0..self.n).filter(|&i| v[i] != 0).all(|i| {
                let mut w = v.to_vec();
                w[i] = 0;
                self.contains(&w)
            })
        })
    }
}

impl Serialize for ServiceSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vecs().serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelState {
    pub psi: f64,
    pub services: ServiceSet,
}

/// I.i.d. channel states, each with its own feasible service set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelModel {
    states: Vec<ChannelState>,
    #[serde(skip)]
    cdf: Vec<f64>,
}

impl ChannelModel {
    pub fn new(states: Vec<ChannelState>) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidModel("channel needs at least one state".into()))?;
        let n = first.services.n();
        for (m, st) in states.iter().enumerate() {
            if !(st.psi.is_finite() && st.psi > 0.0) {
                return Err(Error::InvalidModel(format!("state {m} has probability {}", st.psi)));
            }
            if st.services.n() != n {
                return Err(Error::InvalidModel(format!("state {m} has service length mismatch")));
            }
            if !st.services.is_projection_closed() {
                return Err(Error::InvalidModel(format!(
                    "service set of state {m} is not closed under coordinate projections"
                )));
            }
        }
        let total: f64 = states.iter().map(|s| s.psi).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("state probabilities sum to {total}")));
        }
        let cdf = states
            .iter()
            .scan(0.0, |acc, s| {
                *acc += s.psi;
                Some(*acc)
            })
            .collect();
        Ok(Self { states, cdf })
    }

    /// One fixed state.
    pub fn single(services: ServiceSet) -> Result<Self> {
        Self::new(vec![ChannelState { psi: 1.0, services }])
    }

    pub fn n(&self) -> usize {
        self.states[0].services.n()
    }

    pub fn states(&self) -> &[ChannelState] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn psi(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.psi).collect()
    }

    pub fn services(&self, m: usize) -> &ServiceSet {
        &self.states[m].services
    }

    pub fn s_max(&self) -> i64 {
        self.states.iter().map(|s| s.services.s_max()).max().unwrap_or(0)
    }

    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.states.len() == 1 {
            return 0;
        }
        let u: f64 = rng.random();
        self.cdf.iter().position(|c| *c > u).unwrap_or(self.states.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_closure() {
        let s = ServiceSet::with_projections(2, &[vec![1, 1]]).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.contains(&[0, 0]) && s.contains(&[1, 0]) && s.contains(&[0, 1]));
        assert!(s.is_projection_closed());
        let open = ServiceSet::new(2, &[vec![1, 1]]).unwrap();
        assert!(!open.is_projection_closed());
        assert!(ChannelModel::single(open).is_err());
    }

    #[test]
    fn psi_must_sum_to_one() {
        let s = ServiceSet::with_projections(1, &[vec![1]]).unwrap();
        let bad = ChannelModel::new(vec![
            ChannelState { psi: 0.5, services: s.clone() },
            ChannelState { psi: 0.4, services: s },
        ]);
        assert!(bad.is_err());
    }

    #[test]
    fn rejects_zero_probability_state() {
        let s = ServiceSet::with_projections(1, &[vec![1]]).unwrap();
        let bad = ChannelModel::new(vec![
            ChannelState { psi: 1.0, services: s.clone() },
            ChannelState { psi: 0.0, services: s },
        ]);
        assert!(bad.is_err());
    }

    #[test]
    fn s_max_over_states() {
        let a = ServiceSet::with_projections(2, &[vec![2, 0]]).unwrap();
        let b = ServiceSet::with_projections(2, &[vec![1, 3]]).unwrap();
        let ch = ChannelModel::new(vec![
            ChannelState { psi: 0.5, services: a },
            ChannelState { psi: 0.5, services: b },
        ])
        .unwrap();
        assert_eq!(ch.s_max(), 3);
    }
}
