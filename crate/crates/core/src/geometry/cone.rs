use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::nnls::ConeProjector;
use super::{dot, norm, CapacityRegion};
use crate::error::{Error, Result};

/// Default tolerance for deciding that `ν` lies on a facet.
pub const DEFAULT_FACET_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-9;

/// Facets tight at `nu`: `|⟨c_ℓ, ν⟩ − b_ℓ| ≤ tol`.
pub fn identify_p(region: &CapacityRegion, nu: &[f64], tol: f64) -> Result<Vec<usize>> {
    if nu.len() != region.n() {
        return Err(Error::InvalidTarget("nu has the wrong dimension".into()));
    }
    if let Some((l, f)) = region.facets().iter().enumerate().find(|(_, f)| f.slack(nu) < -tol) {
        return Err(Error::InvalidTarget(format!(
            "nu lies outside the capacity region (facet {l} exceeded by {:.3e})",
            -f.slack(nu)
        )));
    }
    let p: Vec<usize> = region
        .facets()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.slack(nu).abs() <= tol)
        .map(|(l, _)| l)
        .collect();
    if p.is_empty() {
        let gap = region.facets().iter().map(|f| f.slack(nu)).fold(f64::INFINITY, f64::min);
        return Err(Error::NotOnBoundary { gap });
    }
    Ok(p)
}

/// Greedy rank-revealing selection: walks the list in order and keeps a vector
/// when its component orthogonal to the ones already kept has norm above 1e-9.
pub fn select_p_tilde(cs: &[Vec<f64>]) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    for (idx, c) in cs.iter().enumerate() {
        let mut r = c.clone();
        // two passes of modified Gram-Schmidt keep the residual accurate
        for _ in 0..2 {
            for e in &basis {
                let d = dot(&r, e);
                r.iter_mut().zip(e).for_each(|(ri, ei)| *ri -= d * ei);
            }
        }
        let len = norm(&r);
        if len > PIVOT_TOL {
            basis.push(r.iter().map(|v| v / len).collect());
            kept.push(idx);
        }
    }
    kept
}

/// `n × k` matrix whose columns are the normals of the listed facets.
pub fn normals_matrix(region: &CapacityRegion, facets: &[usize]) -> DMatrix<f64> {
    let n = region.n();
    DMatrix::from_fn(n, facets.len(), |r, c| region.facets()[facets[c]].c[r])
}

/// `(CᵀC)⁻¹`.
///
/// Panics when `C` is rank deficient; callers pass linearly independent columns.
pub fn gram_inverse(c: &DMatrix<f64>) -> DMatrix<f64> {
    let gram = c.transpose() * c;
    let chol = gram
        .clone()
        .cholesky()
        .expect("projection_matrix_h requires linearly independent columns");
    let inv = chol.inverse();
    let check = &gram * &inv - DMatrix::identity(gram.nrows(), gram.ncols());
    assert!(
        check.amax() < 1e-6,
        "projection_matrix_h: Gram matrix is numerically singular"
    );
    inv
}

/// `H = C(CᵀC)⁻¹Cᵀ`, the orthogonal projector onto the column space of `C`.
pub fn projection_matrix_h(c: &DMatrix<f64>) -> DMatrix<f64> {
    let h = c * gram_inverse(c) * c.transpose();
    // symmetrize away rounding
    (&h + h.transpose()) * 0.5
}

/// `(Hx, x − Hx)`.
pub fn project_subspace(x: &[f64], h: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let par: Vec<f64> = (h * DVector::from_column_slice(x)).iter().copied().collect();
    let perp = x.iter().zip(&par).map(|(a, b)| a - b).collect();
    (par, perp)
}

/// Distance from `ν` to the facets outside `P`.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaGap {
    pub delta: f64,
    /// `δ / (2‖ν‖)`: heavy-traffic parameters below this are admissible for the SSC bound.
    pub eps_threshold: f64,
    /// `δ ≤ tol`: `ν` is nearly tight on an excluded facet.
    pub degenerate: bool,
}

/// `δ = min_{ℓ ∉ P} (b_ℓ − ⟨c_ℓ, ν⟩)`, or 1 when every facet is tight.
pub fn delta_gap(region: &CapacityRegion, nu: &[f64], p: &[usize], tol: f64) -> DeltaGap {
    let delta = region
        .facets()
        .iter()
        .enumerate()
        .filter(|(l, _)| !p.contains(l))
        .map(|(_, f)| f.slack(nu))
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.min(s))))
        .unwrap_or(1.0);
    let nu_norm = norm(nu);
    DeltaGap {
        delta,
        eps_threshold: if nu_norm > 0.0 { delta / (2.0 * nu_norm) } else { f64::INFINITY },
        degenerate: delta <= tol,
    }
}

/// Cone `K` and subspace `H` spanned by the facets tight at `ν`.
#[derive(Clone, Debug)]
pub struct ConeGeometry {
    /// Facets tight at `ν` (indices into the region).
    pub p: Vec<usize>,
    /// Maximal linearly independent subset of `p`.
    pub p_tilde: Vec<usize>,
    /// Columns `c_ℓ`, `ℓ ∈ P̃`.
    pub c: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub gram_inv: DMatrix<f64>,
    pub delta: DeltaGap,
    pub projector: ConeProjector,
}

impl ConeGeometry {
    pub fn build(region: &CapacityRegion, nu: &[f64], tol: f64) -> Result<Self> {
        let p = identify_p(region, nu, tol)?;
        let normals: Vec<Vec<f64>> = p.iter().map(|&l| region.facets()[l].c.clone()).collect();
        let p_tilde: Vec<usize> = select_p_tilde(&normals).into_iter().map(|i| p[i]).collect();
        let c = normals_matrix(region, &p_tilde);
        let gram_inv = gram_inverse(&c);
        let h = projection_matrix_h(&c);
        let delta = delta_gap(region, nu, &p, tol);
        let projector = ConeProjector::new(region.n(), normals)?;
        Ok(Self { p, p_tilde, c, h, gram_inv, delta, projector })
    }

    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    /// `Hx` written into `out`.
    #[inline]
    pub fn project_h_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n();
        for (r, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = 0.0;
            for (k, xk) in x.iter().enumerate() {
                acc += self.h[(r, k)] * xk;
            }
            *o = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Facet;
    use crate::model::iq_switch_region;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn simplex() -> CapacityRegion {
        CapacityRegion::new(2, vec![Facet::normalized(vec![1.0, 1.0], 1.0).unwrap()]).unwrap()
    }

    #[test]
    fn p_on_simplex() {
        assert_eq!(identify_p(&simplex(), &[0.5, 0.5], 1e-9).unwrap(), vec![0]);
    }

    #[test]
    fn p_on_iq_switch() {
        let r = iq_switch_region(2).unwrap();
        assert_eq!(identify_p(&r, &[0.5; 4], 1e-9).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn interior_nu_rejected() {
        assert!(matches!(
            identify_p(&simplex(), &[0.2, 0.2], 1e-9),
            Err(Error::NotOnBoundary { .. })
        ));
        assert!(matches!(identify_p(&simplex(), &[0.9, 0.9], 1e-9), Err(Error::InvalidTarget(_))));
    }

    #[test]
    fn p_tilde_selection() {
        assert_eq!(select_p_tilde(&[vec![1.0, 0.0], vec![0.0, 1.0]]), vec![0, 1]);
        assert_eq!(select_p_tilde(&[vec![1.0, 0.0], vec![1.0, 0.0]]), vec![0]);
        let r = iq_switch_region(2).unwrap();
        let cs: Vec<Vec<f64>> = r.facets().iter().map(|f| f.c.clone()).collect();
        assert_eq!(select_p_tilde(&cs), vec![0, 1, 2]);
    }

    #[test]
    fn h_examples() {
        let h = projection_matrix_h(&DMatrix::from_column_slice(2, 1, &[1.0, 0.0]));
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let h = projection_matrix_h(&DMatrix::from_column_slice(2, 1, &[FRAC_1_SQRT_2; 2]));
        assert!((h - DMatrix::from_element(2, 2, 0.5)).amax() < 1e-15);
        let c = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.6, 0.8]);
        assert!((projection_matrix_h(&c).trace() - 2.0).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "linearly independent")]
    fn h_rejects_dependent_columns() {
        projection_matrix_h(&DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]));
    }

    #[test]
    fn subspace_projection() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(project_subspace(&[3.0, 4.0], &h), (vec![3.0, 0.0], vec![0.0, 4.0]));
        let (_, perp) = project_subspace(&[5.0, 0.0], &h);
        assert_eq!(perp, vec![0.0, 0.0]);
    }

    #[test]
    fn delta_examples() {
        let r = iq_switch_region(2).unwrap();
        let d = delta_gap(&r, &[0.5; 4], &[0, 1, 2, 3], 1e-9);
        assert_eq!(d.delta, 1.0);
        let boxr = CapacityRegion::new(
            2,
            vec![Facet::new(vec![1.0, 0.0], 1.0).unwrap(), Facet::new(vec![0.0, 1.0], 1.0).unwrap()],
        )
        .unwrap();
        let d = delta_gap(&boxr, &[1.0, 0.4], &[0], 1e-9);
        assert!((d.delta - 0.6).abs() < 1e-15 && !d.degenerate);
        assert!((d.eps_threshold - 0.6 / (2.0 * (1.16f64).sqrt())).abs() < 1e-15);
        let d = delta_gap(&boxr, &[1.0, 1.0 - 1e-12], &[0], 1e-9);
        assert!(d.degenerate);
    }

    #[test]
    fn iq_cone_geometry() {
        let r = iq_switch_region(2).unwrap();
        let g = ConeGeometry::build(&r, &[0.5; 4], 1e-9).unwrap();
        assert_eq!(g.p.len(), 4);
        assert_eq!(g.p_tilde.len(), 3);
        assert!((&g.h * &g.h - &g.h).amax() < 1e-9);
        assert!((&g.h * &g.c - &g.c).amax() < 1e-9);
        assert!((g.h.trace() - 3.0).abs() < 1e-12);
    }
}
