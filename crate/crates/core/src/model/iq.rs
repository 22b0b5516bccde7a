use crate::error::{Error, Result};
use crate::geometry::{CapacityRegion, Facet};

use super::{ArrivalModel, ChannelModel, ServiceSet, SwitchModel};

/// Largest port count for which the permutation set is enumerated.
pub const MAX_IQ_PORTS: usize = 6;

fn check_ports(ports: usize) -> Result<()> {
    if ports < 2 {
        return Err(Error::InvalidModel(format!("input-queued switch needs N >= 2, got {ports}")));
    }
    if ports > MAX_IQ_PORTS {
        return Err(Error::Unsupported(format!(
            "enumerating service vectors of an N={ports} switch (limit {MAX_IQ_PORTS})"
        )));
    }
    Ok(())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                rec(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Single-state channel whose service set is every `N×N` permutation matrix
/// (row-major flattening, entry `(i, j)` at `i·N + j`) plus all sub-permutations.
/// Full permutations come first, in lexicographic order.
pub fn iq_switch_channel(ports: usize) -> Result<ChannelModel> {
    check_ports(ports)?;
    let perms: Vec<Vec<i64>> = permutations(ports)
        .into_iter()
        .map(|p| {
            let mut v = vec![0; ports * ports];
            for (i, j) in p.into_iter().enumerate() {
                v[i * ports + j] = 1;
            }
            v
        })
        .collect();
    ChannelModel::single(ServiceSet::with_projections(ports * ports, &perms)?)
}

/// The `2N` row and column constraints, rows first.
pub fn iq_switch_region(ports: usize) -> Result<CapacityRegion> {
    check_ports(ports)?;
    let n = ports * ports;
    let w = 1.0 / (ports as f64).sqrt();
    let mut facets = Vec::with_capacity(2 * ports);
    for i in 0..ports {
        let mut c = vec![0.0; n];
        (0..ports).for_each(|j| c[i * ports + j] = w);
        facets.push(Facet::new(c, w)?);
    }
    for j in 0..ports {
        let mut c = vec![0.0; n];
        (0..ports).for_each(|i| c[i * ports + j] = w);
        facets.push(Facet::new(c, w)?);
    }
    CapacityRegion::new(n, facets)
}

/// Uniform doubly-stochastic load `1/N` on every queue.
pub fn iq_uniform_nu(ports: usize) -> Vec<f64> {
    vec![1.0 / ports as f64; ports * ports]
}

pub fn make_iq_switch(ports: usize, arrival: ArrivalModel) -> Result<SwitchModel> {
    SwitchModel::new(arrival, iq_switch_channel(ports)?)
}
