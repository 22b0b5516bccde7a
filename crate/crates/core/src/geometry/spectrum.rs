use nalgebra::DMatrix;
use serde::Serialize;

use super::region::facet_b_ml;
use super::CapacityRegion;
use crate::error::{Error, Result};
use crate::model::ChannelModel;

const RATE_IDENTITY_TOL: f64 = 1e-6;

/// Per-state maximal weighted service rates and their covariance.
#[derive(Clone, Debug, Serialize)]
pub struct ServiceSpectrum {
    /// `b^(m,ℓ)` for every state `m` (rows) and facet `ℓ` (columns).
    pub b_ml: DMatrix<f64>,
    /// Covariance of `(B_ℓ)_{ℓ ∈ P̃}` under the channel law.
    pub sigma_b: DMatrix<f64>,
    /// `max_{m,ℓ} b^(m,ℓ)`.
    pub b_max: f64,
    /// `max_{ℓ ∈ P} |Σ_m ψ_m b^(m,ℓ) − b^(ℓ)|`.
    pub rate_identity_error: f64,
}

impl ServiceSpectrum {
    /// `σ²_{B_ℓ}` for the `i`-th facet of `P̃`.
    pub fn variance(&self, i: usize) -> f64 {
        self.sigma_b[(i, i)]
    }
}

pub fn service_spectrum(
    region: &CapacityRegion,
    channel: &ChannelModel,
    p: &[usize],
    p_tilde: &[usize],
) -> Result<ServiceSpectrum> {
    let facets = region.facets();
    let psi = channel.psi();
    let mut b_ml = DMatrix::zeros(channel.num_states(), facets.len());
    for m in 0..channel.num_states() {
        for (l, f) in facets.iter().enumerate() {
            b_ml[(m, l)] = facet_b_ml(&f.c, channel.services(m))?;
        }
    }
    let mean = |l: usize| (0..psi.len()).map(|m| psi[m] * b_ml[(m, l)]).sum::<f64>();

    let mut rate_identity_error = 0.0_f64;
    for &l in p {
        let err = (mean(l) - facets[l].b).abs();
        if err > RATE_IDENTITY_TOL {
            return Err(Error::ModelInconsistency(format!(
                "facet {l}: mean of b^(m,l) is {} but b = {}",
                mean(l),
                facets[l].b
            )));
        }
        rate_identity_error = rate_identity_error.max(err);
    }

    let k = p_tilde.len();
    let mut sigma_b = DMatrix::zeros(k, k);
    for (i, &li) in p_tilde.iter().enumerate() {
        for (j, &lj) in p_tilde.iter().enumerate() {
            // centered form avoids cancellation when the variance is tiny
            let (mi, mj) = (mean(li), mean(lj));
            sigma_b[(i, j)] = (0..psi.len())
                .map(|m| psi[m] * (b_ml[(m, li)] - mi) * (b_ml[(m, lj)] - mj))
                .sum();
        }
    }
    let b_max = b_ml.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ServiceSpectrum { b_ml, sigma_b, b_max, rate_identity_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConeGeometry, Facet};
    use crate::model::{iq_switch_channel, iq_switch_region, ChannelState, ServiceSet};

    fn on_off(psi_on: f64) -> ChannelModel {
        ChannelModel::new(vec![
            ChannelState { psi: psi_on, services: ServiceSet::new(1, &[vec![0], vec![1]]).unwrap() },
            ChannelState { psi: 1.0 - psi_on, services: ServiceSet::new(1, &[vec![0]]).unwrap() },
        ])
        .unwrap()
    }

    #[test]
    fn single_state_has_no_service_noise() {
        let ch = iq_switch_channel(2).unwrap();
        let r = iq_switch_region(2).unwrap();
        let g = ConeGeometry::build(&r, &[0.5; 4], 1e-9).unwrap();
        let s = service_spectrum(&r, &ch, &g.p, &g.p_tilde).unwrap();
        assert_eq!(s.sigma_b, DMatrix::zeros(3, 3));
        assert!(s.rate_identity_error < 1e-12);
    }

    #[test]
    fn on_off_variance() {
        let ch = on_off(0.8);
        let r = CapacityRegion::new(1, vec![Facet::new(vec![1.0], 0.8).unwrap()]).unwrap();
        let s = service_spectrum(&r, &ch, &[0], &[0]).unwrap();
        assert!((s.sigma_b[(0, 0)] - 0.16).abs() < 1e-15);
        assert_eq!(s.b_max, 1.0);
    }

    #[test]
    fn identical_facets_fully_correlated() {
        let ch = on_off(0.8);
        let f = Facet::new(vec![1.0], 0.8).unwrap();
        let r = CapacityRegion::new(1, vec![f.clone(), f]).unwrap();
        let s = service_spectrum(&r, &ch, &[0, 1], &[0, 1]).unwrap();
        let v = s.sigma_b[(0, 0)];
        assert!(s.sigma_b.iter().all(|x| (x - v).abs() < 1e-15));
    }

    #[test]
    fn rate_identity_mismatch_is_reported() {
        let ch = on_off(0.8);
        let r = CapacityRegion::new(1, vec![Facet::new(vec![1.0], 0.9).unwrap()]).unwrap();
        assert!(matches!(
            service_spectrum(&r, &ch, &[0], &[0]),
            Err(Error::ModelInconsistency(_))
        ));
    }
}
