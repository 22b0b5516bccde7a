//! Capacity region and cone geometry for an on/off single queue and a 2x2
//! input-queued switch.

use htq::geometry::{SwitchGeometry, DEFAULT_FACET_TOL};
use htq::model::{
    iq_switch_channel, iq_switch_region, iq_uniform_nu, ChannelModel, ChannelState, ServiceSet,
};

fn main() -> htq::Result<()> {
    let channel = ChannelModel::new(vec![
        ChannelState { psi: 0.8, services: ServiceSet::with_projections(1, &[vec![1]])? },
        ChannelState { psi: 0.2, services: ServiceSet::new(1, &[vec![0]])? },
    ])?;
    let g = SwitchGeometry::from_channel(&channel, &[0.8], DEFAULT_FACET_TOL)?;
    println!("on/off queue");
    for f in g.region.facets() {
        println!("  facet c = {:?}, b = {}", f.c, f.b);
    }
    println!("  sigma_B^2 = {:.4}, b_max = {}", g.spectrum.sigma_b[(0, 0)], g.spectrum.b_max);

    let iq = iq_switch_channel(2)?;
    let g = SwitchGeometry::build(&iq, iq_switch_region(2)?, &iq_uniform_nu(2), DEFAULT_FACET_TOL)?;
    println!("2x2 input-queued switch");
    println!("  |P| = {}, |P~| = {}, delta = {}", g.cone.p.len(), g.cone.p_tilde.len(), g.cone.delta.delta);
    println!("  trace(H) = {:.6}", g.cone.h.trace());
    println!("  H = {:.4}", g.cone.h);
    Ok(())
}
