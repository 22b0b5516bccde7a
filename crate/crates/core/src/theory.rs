//! Closed-form heavy-traffic limits, lower bounds, state-space-collapse
//! moment bounds, and the logarithmic error fit.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NEG_TOL: f64 = 1e-12;

fn hadamard_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::InvalidInput(format!(
            "shape mismatch {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.component_mul(b).sum())
}

fn check_eps(eps: f64, upper: f64) -> Result<()> {
    if !(eps > 0.0 && eps < upper) {
        return Err(Error::InvalidInput(format!("eps {eps} outside (0, {upper})")));
    }
    Ok(())
}

/// Heavy-traffic limit of `ε·E⟨q, w⟩ / ε`:
/// `(1/2ε)[1ᵀ(H ∘ Σ_a)1 + 1ᵀ((CᵀC)⁻¹ ∘ Σ_B)1]`.
pub fn ht_limit(
    h: &DMatrix<f64>,
    sigma_a: &DMatrix<f64>,
    gram_inv: &DMatrix<f64>,
    sigma_b: &DMatrix<f64>,
    eps: f64,
) -> Result<f64> {
    check_eps(eps, 1.0)?;
    let v = (hadamard_sum(h, sigma_a)? + hadamard_sum(gram_inv, sigma_b)?) / (2.0 * eps);
    if v < -NEG_TOL {
        return Err(Error::NumericalInconsistency(format!("negative heavy-traffic limit {v}")));
    }
    Ok(v.max(0.0))
}

/// Universal lower bound on `E⟨q, c⟩` for any scheduler when a single facet is tight.
pub fn ulb(c: &[f64], b: f64, sigma_a: &DMatrix<f64>, sigma_b2: f64, b_max: f64, eps: f64) -> Result<f64> {
    check_eps(eps, 1.0)?;
    if b <= 0.0 {
        return Err(Error::InvalidInput("b must be positive".into()));
    }
    let n = c.len();
    if sigma_a.shape() != (n, n) {
        return Err(Error::InvalidInput("Sigma_a does not match c".into()));
    }
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += c[i] * sigma_a[(i, j)] * c[j];
        }
    }
    Ok((quad + sigma_b2) / (2.0 * eps * b) - (1.0 - eps) * b_max / 2.0)
}

/// Position of a simulated mean relative to the universal lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub gap: f64,
    /// `gap / log(1/ε)`.
    pub ratio: f64,
    /// The simulated mean sits more than three half-widths below the bound.
    pub violation: bool,
}

pub fn crp_gap_bound(ulb_value: f64, sim_mean: f64, ci_half_width: f64, eps: f64) -> GapReport {
    let gap = sim_mean - ulb_value;
    GapReport {
        gap,
        ratio: gap / (1.0 / eps).ln(),
        violation: sim_mean < ulb_value - 3.0 * ci_half_width,
    }
}

/// A bound value; `saturated` is set when the evaluation overflowed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub saturated: bool,
}

impl Bound {
    fn from_value(v: f64) -> Self {
        if v.is_finite() {
            Self { value: v, saturated: false }
        } else {
            Self { value: f64::MAX, saturated: true }
        }
    }
}

fn factorial(r: u32) -> f64 {
    (1..=r).map(f64::from).product()
}

fn check_bound_args(alpha: f64, delta: f64, r: u32) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be >= 1".into()));
    }
    if delta.is_nan() || delta <= 0.0 || alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidInput(format!("need delta > 0 and alpha >= 0, got {delta}, {alpha}")));
    }
    Ok(())
}

/// Moment bound on `E‖q_⊥K‖^r` for MaxWeight:
/// `(8nα²/δ)^r + (8√n·α)^r ((8√n·α + δ)/δ)^r r!`.
pub fn ssc_bound_rr(n: usize, alpha: f64, delta: f64, r: u32) -> Result<Bound> {
    check_bound_args(alpha, delta, r)?;
    let nf = n as f64;
    let k = 8.0 * nf.sqrt() * alpha;
    let ri = r as i32;
    Ok(Bound::from_value(
        (8.0 * nf * alpha * alpha / delta).powi(ri) + k.powi(ri) * ((k + delta) / delta).powi(ri) * factorial(r),
    ))
}

/// Moment bound on `E‖q_⊥‖^r` for JSQ:
/// `(6nα²/δ)^r + (8α√n)^r ((4α + δ)/δ) r!`.
pub fn ssc_bound_jsq(n: usize, alpha: f64, delta: f64, r: u32) -> Result<Bound> {
    check_bound_args(alpha, delta, r)?;
    let nf = n as f64;
    let ri = r as i32;
    Ok(Bound::from_value(
        (6.0 * nf * alpha * alpha / delta).powi(ri)
            + (8.0 * alpha * nf.sqrt()).powi(ri) * ((4.0 * alpha + delta) / delta) * factorial(r),
    ))
}

/// Heavy-traffic limit for JSQ: `(σ_a² + Σσ_{s_i}²) / 2ε`.
pub fn jsq_limit(sigma_a2: f64, sigma_s2: &[f64], eps: f64) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidInput(format!("eps {eps} must be positive")));
    }
    Ok((sigma_a2 + sigma_s2.iter().sum::<f64>()) / (2.0 * eps))
}

/// Least-squares fits of the residual against `a + b·log(1/ε)` and `c/ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    /// `max_j residual_j / log(1/ε_j)`.
    pub max_ratio: f64,
    pub log_sse: f64,
    pub inv_eps_coef: f64,
    pub inv_eps_sse: f64,
}

impl LogFit {
    pub fn prefers_log(&self) -> bool {
        self.log_sse < self.inv_eps_sse
    }
}

pub fn fit_log_error(points: &[(f64, f64)]) -> Result<LogFit> {
    if points.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 points".into()));
    }
    for &(e, r) in points {
        if !(e > 0.0 && e < 1.0) || r < 0.0 || !r.is_finite() {
            return Err(Error::InvalidInput(format!("bad point ({e}, {r})")));
        }
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(e, _)| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, r)| *r).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 1e-12 * (1.0 + mx * mx) {
        return Err(Error::InvalidInput("all eps values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let log_sse = xs.iter().zip(&ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();

    let zs: Vec<f64> = points.iter().map(|(e, _)| 1.0 / e).collect();
    let c = zs.iter().zip(&ys).map(|(z, y)| z * y).sum::<f64>() / zs.iter().map(|z| z * z).sum::<f64>();
    let inv_eps_sse = zs.iter().zip(&ys).map(|(z, y)| (y - c * z).powi(2)).sum();

    let max_ratio = xs.iter().zip(&ys).map(|(x, y)| y / x).fold(0.0, f64::max);
    Ok(LogFit { a, b, max_ratio, log_sse, inv_eps_coef: c, inv_eps_sse })
}

/// One row of a moment-bound table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentBound {
    pub r: u32,
    pub bound: Bound,
}

pub fn bound_table(
    f: fn(usize, f64, f64, u32) -> Result<Bound>,
    n: usize,
    alpha: f64,
    delta: f64,
    orders: &[u32],
) -> Result<Vec<MomentBound>> {
    orders.iter().map(|&r| Ok(MomentBound { r, bound: f(n, alpha, delta, r)? })).collect()
}

/// Theory values attached to one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub eps: f64,
    /// `ht_limit` for a switch, `jsq_limit` for load balancing.
    pub limit: f64,
    pub ulb: Option<f64>,
    pub bounds: Vec<MomentBound>,
}

/// Theory values across a sweep, with the fitted residual model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub points: Vec<TheoryPoint>,
    pub b_max: Option<f64>,
    pub fit: Option<LogFit>,
}

impl TheoryReport {
    /// Nonnegative limits and bounds nondecreasing in `r`.
    pub fn check_invariants(&self) -> Result<()> {
        for p in &self.points {
            if p.limit < 0.0 {
                return Err(Error::NumericalInconsistency(format!("negative limit at eps {}", p.eps)));
            }
            for w in p.bounds.windows(2) {
                if w[0].r < w[1].r && w[1].bound.value < w[0].bound.value {
                    return Err(Error::NumericalInconsistency(format!(
                        "moment bound decreases in r at eps {}",
                        p.eps
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    #[test]
    fn scalar_limit() {
        let v = ht_limit(&s(1.0), &s(0.2475), &s(1.0), &s(0.16), 0.05).unwrap();
        assert!((v - (0.2475 + 0.16) / 0.1).abs() < 1e-12);
        assert_eq!(ht_limit(&s(1.0), &s(0.0), &s(1.0), &s(0.0), 0.3).unwrap(), 0.0);
    }

    #[test]
    fn limit_rejects_negative_and_bad_eps() {
        assert!(matches!(
            ht_limit(&s(1.0), &s(-1.0), &s(1.0), &s(0.0), 0.1),
            Err(Error::NumericalInconsistency(_))
        ));
        assert!(ht_limit(&s(1.0), &s(1.0), &s(1.0), &s(0.0), 0.0).is_err());
        assert!(ht_limit(&s(1.0), &s(1.0), &s(1.0), &s(0.0), 1.0).is_err());
    }

    #[test]
    fn limit_homogeneous_in_eps() {
        let a = ht_limit(&s(1.0), &s(0.3), &s(1.0), &s(0.1), 0.2).unwrap();
        let b = ht_limit(&s(1.0), &s(0.3), &s(1.0), &s(0.1), 0.1).unwrap();
        assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn ulb_examples() {
        let v = ulb(&[1.0], 1.0, &s(0.25), 0.0, 1.0, 0.1).unwrap();
        assert!((v - 0.8).abs() < 1e-12);
        let v = ulb(&[1.0], 1.0, &s(0.0), 0.0, 1.0, 0.1).unwrap();
        assert!((v + 0.45).abs() < 1e-12);
        let v = ulb(&[1.0], 2.0, &s(0.5), 0.3, 1.0, 1.0 - 1e-12).unwrap();
        assert!((v - 0.8 / 4.0).abs() < 1e-9);
        assert!(ulb(&[1.0], 0.0, &s(0.5), 0.3, 1.0, 0.1).is_err());
    }

    #[test]
    fn gap_report() {
        let g = crp_gap_bound(1.0, 1.0, 0.1, 0.1);
        assert_eq!(g.gap, 0.0);
        let g = crp_gap_bound(1.0, 1.5, 0.1, (-1.0f64).exp());
        assert!((g.ratio - 0.5).abs() < 1e-12);
        assert!(!g.violation);
        assert!(crp_gap_bound(1.0, 0.5, 0.1, 0.1).violation);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(ssc_bound_rr(1, 1.0, 1.0, 1).unwrap().value, 80.0);
        assert_eq!(ssc_bound_rr(1, 1.0, 1.0, 2).unwrap().value, 10432.0);
        assert_eq!(ssc_bound_jsq(1, 1.0, 1.0, 1).unwrap().value, 46.0);
        assert_eq!(ssc_bound_jsq(1, 1.0, 1.0, 2).unwrap().value, 676.0);
        assert!(ssc_bound_rr(1, 1.0, 0.0, 1).is_err());
        assert!(ssc_bound_jsq(1, 1.0, 1.0, 0).is_err());
        let tiny = ssc_bound_jsq(2, 1.0, 1e-300, 6).unwrap();
        assert!(tiny.saturated);
    }

    #[test]
    fn jsq_limit_examples() {
        assert!((jsq_limit(0.21, &[0.25, 0.25], 0.1).unwrap() - 3.55).abs() < 1e-12);
        assert_eq!(jsq_limit(0.0, &[0.0, 0.0], 0.1).unwrap(), 0.0);
        let a = jsq_limit(0.21, &[0.25, 0.25], 0.1).unwrap();
        assert_eq!(jsq_limit(0.21, &[0.25, 0.25], 0.05).unwrap(), 2.0 * a);
    }

    #[test]
    fn exact_log_fit() {
        let pts: Vec<(f64, f64)> = (1..=3).map(|k| ((-(k as f64)).exp(), 2.0 * k as f64)).collect();
        let f = fit_log_error(&pts).unwrap();
        assert!(f.a.abs() < 1e-12 && (f.b - 2.0).abs() < 1e-12);
        assert!((f.max_ratio - 2.0).abs() < 1e-12);
        let zero: Vec<(f64, f64)> = pts.iter().map(|(e, _)| (*e, 0.0)).collect();
        let f = fit_log_error(&zero).unwrap();
        assert_eq!((f.a, f.b, f.max_ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn fit_rejects_degenerate() {
        assert!(matches!(
            fit_log_error(&[(0.1, 1.0), (0.1, 2.0), (0.1, 3.0)]),
            Err(Error::InvalidInput(_))
        ));
        assert!(fit_log_error(&[(0.1, 1.0), (0.2, 2.0)]).is_err());
    }

    #[test]
    fn ulb_monotone() {
        let base = ulb(&[0.6, 0.8], 0.7, &DMatrix::identity(2, 2), 0.1, 1.0, 0.1).unwrap();
        assert!(ulb(&[0.6, 0.8], 0.7, &DMatrix::identity(2, 2), 0.1, 1.5, 0.1).unwrap() <= base);
        assert!(ulb(&[0.6, 0.8], 0.7, &DMatrix::identity(2, 2), 0.2, 1.0, 0.1).unwrap() >= base);
    }
}
