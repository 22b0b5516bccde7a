use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{dot, norm, CapacityRegion, Facet};
use crate::error::{Error, Result};
use crate::model::{ChannelModel, ServiceSet};

/// Largest dimension handled by brute-force facet enumeration.
pub const MAX_BRUTE_FORCE_DIM: usize = 3;

const TIGHT_TOL: f64 = 1e-9;
const CANDIDATE_LIMIT: f64 = 5e7;

/// `max_{x ∈ S} ⟨c, x⟩`.
pub fn facet_b_ml(c: &[f64], services: &ServiceSet) -> Result<f64> {
    if services.is_empty() {
        return Err(Error::InvalidModel("empty service set".into()));
    }
    if c.len() != services.n() {
        return Err(Error::InvalidModel("normal and service dimensions differ".into()));
    }
    Ok(services
        .iter()
        .map(|x| c.iter().zip(x).map(|(ci, xi)| ci * *xi as f64).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Support function of `Σ_m ψ_m ConvHull(S^(m))` in direction `c`.
pub fn support(c: &[f64], channel: &ChannelModel) -> Result<f64> {
    channel
        .states()
        .iter()
        .map(|st| facet_b_ml(c, &st.services).map(|b| st.psi * b))
        .sum()
}

/// All points `Σ_m ψ_m x_m` with `x_m ∈ S^(m)`, deduplicated.
fn mixture_points(channel: &ChannelModel) -> Vec<Vec<f64>> {
    let n = channel.n();
    let mut points = vec![vec![0.0; n]];
    for st in channel.states() {
        let mut seen = HashSet::new();
        let mut next = Vec::with_capacity(points.len() * st.services.len());
        for p in &points {
            for x in st.services.iter() {
                let v: Vec<f64> = p.iter().zip(x).map(|(pi, xi)| pi + st.psi * *xi as f64).collect();
                let key: Vec<i64> = v.iter().map(|t| (t * 1e9).round() as i64).collect();
                if seen.insert(key) {
                    next.push(v);
                }
            }
        }
        points = next;
    }
    points
}

fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn cross(u: &[f64], v: &[f64]) -> Vec<f64> {
    vec![u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

/// Facets of `Σ_m ψ_m ConvHull(S^(m))` other than the coordinate facets `x_i ≥ 0`,
/// enumerated exactly for `n ≤ 3`.
///
/// Every supporting hyperplane through `n` affinely independent mixture points
/// is a facet; those with a nonnegative normal are kept. Facets are returned
/// sorted by normal (lexicographically descending).
pub fn build_capacity_region(channel: &ChannelModel) -> Result<CapacityRegion> {
    let n = channel.n();
    if n > MAX_BRUTE_FORCE_DIM {
        return Err(Error::Unsupported(format!(
            "brute-force capacity region for n = {n}; supply candidate facets instead"
        )));
    }
    let points = mixture_points(channel);
    let combos = (points.len() as f64).powi(n as i32);
    if combos > CANDIDATE_LIMIT {
        return Err(Error::Unsupported(format!(
            "{} mixture points is too many for brute-force enumeration",
            points.len()
        )));
    }
    let scale = 1.0 + points.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));

    let mut candidates: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    match n {
        1 => candidates.push((vec![1.0], vec![])),
        2 => {
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    let d = sub(&points[j], &points[i]);
                    candidates.push((vec![-d[1], d[0]], vec![i, j]));
                }
            }
        }
        _ => {
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    let u = sub(&points[j], &points[i]);
                    for k in j + 1..points.len() {
                        let v = sub(&points[k], &points[i]);
                        candidates.push((cross(&u, &v), vec![i, j, k]));
                    }
                }
            }
        }
    }

    let mut facets: Vec<Facet> = Vec::new();
    for (raw, defining) in candidates {
        let len = norm(&raw);
        if len < 1e-12 {
            continue;
        }
        for sign in [1.0, -1.0] {
            let c: Vec<f64> = raw.iter().map(|v| sign * v / len).collect();
            if c.iter().any(|v| *v < -1e-9) {
                continue;
            }
            let h = points.iter().map(|p| dot(&c, p)).fold(f64::NEG_INFINITY, f64::max);
            if defining.iter().any(|&i| dot(&c, &points[i]) < h - TIGHT_TOL * scale) {
                continue;
            }
            let clamped: Vec<f64> = c.iter().map(|v| v.max(0.0)).collect();
            let cl = norm(&clamped);
            let c: Vec<f64> = clamped.iter().map(|v| v / cl).collect();
            let h = points.iter().map(|p| dot(&c, p)).fold(f64::NEG_INFINITY, f64::max);
            if h <= 1e-12 {
                return Err(Error::InvalidModel(format!(
                    "degenerate capacity region: facet {c:?} has offset {h}"
                )));
            }
            if !facets.iter().any(|f| f.c.iter().zip(&c).all(|(a, b)| (a - b).abs() < 1e-9)) {
                facets.push(Facet::new(c, h)?);
            }
        }
    }
    facets.sort_by(|a, b| b.c.partial_cmp(&a.c).unwrap_or(std::cmp::Ordering::Equal));
    CapacityRegion::new(n, facets)
}

/// Outcome of checking a facet list against a channel.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    /// `(facet, excess)` where the support value exceeds `b`.
    pub containment: Vec<(usize, f64)>,
    /// `(facet, gap)` where no mixture point reaches the facet.
    pub tightness: Vec<(usize, f64)>,
    /// Sampled mixture points that violate a facet: `(facet, point, excess)`.
    pub sampled: Vec<(usize, Vec<f64>, f64)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.containment.is_empty() && self.tightness.is_empty() && self.sampled.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        let mut parts = Vec::new();
        for (l, e) in &self.containment {
            parts.push(format!("facet {l} cuts off mixture points by {e:.3e}"));
        }
        for (l, g) in &self.tightness {
            parts.push(format!("facet {l} is not tight (gap {g:.3e})"));
        }
        if let Some((l, p, e)) = self.sampled.first() {
            parts.push(format!("point {p:?} violates facet {l} by {e:.3e}"));
        }
        Err(Error::Validation(parts.join("; ")))
    }
}

/// Checks containment and tightness of every facet.
///
/// For each facet the maximum of `⟨c, ·⟩` over all mixture points is
/// `Σ_m ψ_m b^(m,ℓ)`; containment needs it `≤ b + 1e-9`, tightness `≥ b − 1e-9`.
/// In addition `samples` random mixture points are spot-checked.
pub fn validate_capacity_region(
    region: &CapacityRegion,
    channel: &ChannelModel,
    samples: usize,
) -> Result<ValidationReport> {
    if region.n() != channel.n() {
        return Err(Error::InvalidModel("region and channel dimensions differ".into()));
    }
    let mut report = ValidationReport::default();
    for (l, f) in region.facets().iter().enumerate() {
        let h = support(&f.c, channel)?;
        if h > f.b + TIGHT_TOL {
            report.containment.push((l, h - f.b));
        } else if h < f.b - TIGHT_TOL {
            report.tightness.push((l, f.b - h));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let n = channel.n();
    for _ in 0..samples {
        let mut p = vec![0.0; n];
        for st in channel.states() {
            let x = st.services.get(rng.random_range(0..st.services.len()));
            for (pi, xi) in p.iter_mut().zip(x) {
                *pi += st.psi * *xi as f64;
            }
        }
        for (l, f) in region.facets().iter().enumerate() {
            let excess = -f.slack(&p);
            if excess > TIGHT_TOL {
                report.sampled.push((l, p.clone(), excess));
            }
        }
    }
    Ok(report)
}
