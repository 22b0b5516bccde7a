//! Euclidean projection onto a finitely generated cone by active-set
//! nonnegative least squares (Lawson–Hanson), working on the Gram matrix of
//! the generators so the per-call cost depends only on the cone size.

use super::{dot, norm};
use crate::error::{Error, Result};

/// Result of projecting `x` onto `K = {Σ ξ_ℓ c_ℓ : ξ ≥ 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeProjection {
    pub par: Vec<f64>,
    pub perp: Vec<f64>,
    pub xi: Vec<f64>,
}

impl ConeProjection {
    /// KKT certificate: `ξ ≥ 0`, `⟨x⊥, x∥⟩ ≈ 0`, `⟨x⊥, c_ℓ⟩ ≤ 0` for every generator.
    pub fn certify(&self, normals: &[Vec<f64>], tol: f64) -> bool {
        let x2: f64 = self.par.iter().zip(&self.perp).map(|(a, b)| (a + b) * (a + b)).sum();
        let scale = x2.sqrt().max(1.0);
        self.xi.iter().all(|v| *v >= 0.0)
            && dot(&self.perp, &self.par).abs() <= tol * x2.max(1.0)
            && normals.iter().all(|c| dot(&self.perp, c) <= tol * scale)
    }
}

/// Work buffers for [`ConeProjector::project_into`]; one per thread.
#[derive(Clone, Debug, Default)]
pub struct ConeScratch {
    pub xi: Vec<f64>,
    d: Vec<f64>,
    z: Vec<f64>,
    w: Vec<f64>,
    passive: Vec<bool>,
    blocked: Vec<bool>,
    idx: Vec<usize>,
    chol: Vec<f64>,
    rhs: Vec<f64>,
}

/// Reusable projector onto the cone generated by a fixed list of normals.
#[derive(Clone, Debug)]
pub struct ConeProjector {
    n: usize,
    normals: Vec<Vec<f64>>,
    gram: Vec<f64>,
    max_iter: usize,
}

impl ConeProjector {
    pub fn new(n: usize, normals: Vec<Vec<f64>>) -> Result<Self> {
        if normals.is_empty() {
            return Err(Error::InvalidInput("cone needs at least one generator".into()));
        }
        if normals.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput("cone generators have the wrong length".into()));
        }
        let k = normals.len();
        let mut gram = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                gram[i * k + j] = dot(&normals[i], &normals[j]);
            }
        }
        Ok(Self { n, normals, gram, max_iter: 100 * k })
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn project(&self, x: &[f64]) -> Result<ConeProjection> {
        let mut par = vec![0.0; self.n];
        let mut scratch = ConeScratch::default();
        self.project_into(x, &mut par, &mut scratch)?;
        let xi = scratch.xi;
        let perp = x.iter().zip(&par).map(|(a, b)| a - b).collect();
        Ok(ConeProjection { par, perp, xi })
    }

    /// Writes the projection into `par`; the cone coefficients are left in `s.xi`.
    pub fn project_into(&self, x: &[f64], par: &mut [f64], s: &mut ConeScratch) -> Result<()> {
        self.solve(x, s)?;
        par.iter_mut().for_each(|p| *p = 0.0);
        for (c, xi) in self.normals.iter().zip(&s.xi) {
            if *xi != 0.0 {
                par.iter_mut().zip(c).for_each(|(p, ci)| *p += xi * ci);
            }
        }
        Ok(())
    }

    fn solve(&self, x: &[f64], s: &mut ConeScratch) -> Result<()> {
        let k = self.normals.len();
        s.d.clear();
        s.d.extend(self.normals.iter().map(|c| dot(c, x)));
        s.xi.clear();
        s.xi.resize(k, 0.0);
        s.z.resize(k, 0.0);
        s.w.resize(k, 0.0);
        s.passive.clear();
        s.passive.resize(k, false);
        s.blocked.clear();
        s.blocked.resize(k, false);
        let tol = 1e-11 * norm(x).max(1.0);

        let mut iterations = 0;
        loop {
            self.gradient(s);
            let entering = (0..k)
                .filter(|&j| !s.passive[j] && !s.blocked[j] && s.w[j] > tol)
                .max_by(|&a, &b| s.w[a].total_cmp(&s.w[b]));
            let Some(j) = entering else { break };
            s.passive[j] = true;

            loop {
                iterations += 1;
                if iterations > self.max_iter {
                    return Err(Error::NumericalFailure(format!(
                        "cone projection did not converge in {} iterations for x = {x:?}",
                        self.max_iter
                    )));
                }
                if !self.solve_passive(s) {
                    // numerically dependent generator: leave it out
                    s.passive[j] = false;
                    s.blocked[j] = true;
                    break;
                }
                if (0..k).filter(|&i| s.passive[i]).all(|i| s.z[i] > 0.0) {
                    s.xi.copy_from_slice(&s.z);
                    s.blocked.iter_mut().for_each(|b| *b = false);
                    break;
                }
                let mut alpha = f64::INFINITY;
                for i in (0..k).filter(|&i| s.passive[i] && s.z[i] <= 0.0) {
                    let denom = s.xi[i] - s.z[i];
                    let step = if denom > 0.0 { s.xi[i] / denom } else { 0.0 };
                    alpha = alpha.min(step);
                }
                for i in 0..k {
                    s.xi[i] += alpha * (s.z[i] - s.xi[i]);
                    if s.passive[i] && s.xi[i] <= 1e-15 {
                        s.passive[i] = false;
                        s.xi[i] = 0.0;
                    }
                }
            }
        }
        Ok(())
    }

    fn gradient(&self, s: &mut ConeScratch) {
        let k = self.normals.len();
        for i in 0..k {
            let mut g = s.d[i];
            for j in 0..k {
                g -= self.gram[i * k + j] * s.xi[j];
            }
            s.w[i] = g;
        }
    }

    /// Solves `G_PP z_P = d_P` by Cholesky; returns false on a non-positive pivot.
    fn solve_passive(&self, s: &mut ConeScratch) -> bool {
        let k = self.normals.len();
        s.idx.clear();
        s.idx.extend((0..k).filter(|&i| s.passive[i]));
        let m = s.idx.len();
        s.chol.clear();
        s.chol.resize(m * m, 0.0);
        for a in 0..m {
            for b in 0..=a {
                let mut v = self.gram[s.idx[a] * k + s.idx[b]];
                for t in 0..b {
                    v -= s.chol[a * m + t] * s.chol[b * m + t];
                }
                if a == b {
                    if v <= 1e-12 * self.gram[s.idx[a] * k + s.idx[a]] {
                        return false;
                    }
                    s.chol[a * m + a] = v.sqrt();
                } else {
                    s.chol[a * m + b] = v / s.chol[b * m + b];
                }
            }
        }
        s.rhs.clear();
        s.rhs.extend(s.idx.iter().map(|&i| s.d[i]));
        for a in 0..m {
            let mut v = s.rhs[a];
            for t in 0..a {
                v -= s.chol[a * m + t] * s.rhs[t];
            }
            s.rhs[a] = v / s.chol[a * m + a];
        }
        for a in (0..m).rev() {
            let mut v = s.rhs[a];
            for t in a + 1..m {
                v -= s.chol[t * m + a] * s.rhs[t];
            }
            s.rhs[a] = v / s.chol[a * m + a];
        }
        s.z.iter_mut().for_each(|z| *z = 0.0);
        for (a, &i) in s.idx.iter().enumerate() {
            s.z[i] = s.rhs[a];
        }
        true
    }
}

/// Projects `x` onto the cone generated by `normals`.
pub fn project_cone(x: &[f64], normals: &[Vec<f64>]) -> Result<ConeProjection> {
    ConeProjector::new(x.len(), normals.to_vec())?.project(x)
}
