//! Capacity-region polytope, tight facets, and the cone/subspace projections
//! used to measure state space collapse.

mod cone;
mod nnls;
mod region;
mod spectrum;

use std::io::{Read, Write};

use serde::Serialize;

pub use cone::{
    delta_gap, gram_inverse, identify_p, normals_matrix, project_subspace, projection_matrix_h,
    select_p_tilde, ConeGeometry, DeltaGap, DEFAULT_FACET_TOL,
};
pub use nnls::{project_cone, ConeProjection, ConeProjector, ConeScratch};
pub use region::{
    build_capacity_region, facet_b_ml, support, validate_capacity_region, ValidationReport,
    MAX_BRUTE_FORCE_DIM,
};
pub use spectrum::{service_spectrum, ServiceSpectrum};

use crate::error::{Error, Result};
use crate::model::ChannelModel;

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Half-space `⟨c, x⟩ ≤ b` with `c ≥ 0`, `‖c‖ = 1`, `b > 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Facet {
    pub c: Vec<f64>,
    pub b: f64,
}

impl Facet {
    pub fn new(c: Vec<f64>, b: f64) -> Result<Self> {
        if c.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidModel(format!("facet normal {c:?} must be nonnegative")));
        }
        if (norm(&c) - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidModel(format!("facet normal {c:?} is not unit length")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidModel(format!("facet offset {b} must be positive")));
        }
        Ok(Self { c, b })
    }

    /// Rescales an arbitrary nonnegative `(c, b)` pair to unit normal.
    pub fn normalized(c: Vec<f64>, b: f64) -> Result<Self> {
        let len = norm(&c);
        if len == 0.0 || !len.is_finite() {
            return Err(Error::InvalidModel("facet normal is zero".into()));
        }
        Self::new(c.iter().map(|v| v / len).collect(), b / len)
    }

    pub fn slack(&self, x: &[f64]) -> f64 {
        self.b - dot(&self.c, x)
    }
}

/// `{x ≥ 0 : ⟨c_ℓ, x⟩ ≤ b_ℓ for all ℓ}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityRegion {
    n: usize,
    facets: Vec<Facet>,
}

impl CapacityRegion {
    pub fn new(n: usize, facets: Vec<Facet>) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::InvalidModel("capacity region has no facets".into()));
        }
        if let Some(f) = facets.iter().find(|f| f.c.len() != n) {
            return Err(Error::InvalidModel(format!("facet {:?} is not {n}-dimensional", f.c)));
        }
        Ok(Self { n, facets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        x.iter().all(|v| *v >= -slack) && self.facets.iter().all(|f| f.slack(x) >= -slack)
    }

    /// CSV with header `facet_id,c_1..c_n,b`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["facet_id".to_string()];
        header.extend((1..=self.n).map(|i| format!("c_{i}")));
        header.push("b".into());
        w.write_record(&header)?;
        for (id, f) in self.facets.iter().enumerate() {
            let mut row = vec![id.to_string()];
            row.extend(f.c.iter().map(|v| format!("{v:.17e}")));
            row.push(format!("{:.17e}", f.b));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let n = r
            .headers()?
            .len()
            .checked_sub(2)
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::InvalidInput("facet CSV needs facet_id, c_1.., b".into()))?;
        let mut facets = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let vals = rec
                .iter()
                .skip(1)
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidInput(format!("bad facet CSV value: {e}")))?;
            let (c, b) = vals.split_at(n);
            facets.push(Facet::new(c.to_vec(), b[0])?);
        }
        Self::new(n, facets)
    }
}

/// Capacity region, the cone geometry at `ν`, and the service-randomness
/// statistics: everything the switch simulator and theory need.
#[derive(Clone, Debug)]
pub struct SwitchGeometry {
    pub region: CapacityRegion,
    pub nu: Vec<f64>,
    pub cone: ConeGeometry,
    pub spectrum: ServiceSpectrum,
}

impl SwitchGeometry {
    pub fn build(
        channel: &ChannelModel,
        region: CapacityRegion,
        nu: &[f64],
        facet_tol: f64,
    ) -> Result<Self> {
        if region.n() != channel.n() || nu.len() != channel.n() {
            return Err(Error::InvalidModel("region, channel and nu dimensions differ".into()));
        }
        let cone = ConeGeometry::build(&region, nu, facet_tol)?;
        let spectrum = service_spectrum(&region, channel, &cone.p, &cone.p_tilde)?;
        Ok(Self { region, nu: nu.to_vec(), cone, spectrum })
    }

    /// Brute-force region (n ≤ 3) followed by [`SwitchGeometry::build`].
    pub fn from_channel(channel: &ChannelModel, nu: &[f64], facet_tol: f64) -> Result<Self> {
        Self::build(channel, build_capacity_region(channel)?, nu, facet_tol)
    }

    /// Indices of the facets in `P`, with their normals, for probes.
    pub fn tight_facets(&self) -> impl Iterator<Item = (usize, &Facet)> + '_ {
        self.cone.p.iter().map(move |&l| (l, &self.region.facets()[l]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn facet_normalization() {
        let f = Facet::normalized(vec![1.0, 1.0], 1.0).unwrap();
        assert!((f.c[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((f.b - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(Facet::new(vec![1.0, 1.0], 1.0).is_err());
        assert!(Facet::new(vec![1.0], 0.0).is_err());
        assert!(Facet::new(vec![-1.0], 1.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let region = crate::model::iq_switch_region(2).unwrap();
        let mut buf = Vec::new();
        region.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("facet_id,c_1,c_2,c_3,c_4,b\n"));
        let back = CapacityRegion::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, region);
    }
}
