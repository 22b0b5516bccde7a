//! 2x2 input-queued switch under MaxWeight near the boundary of its capacity
//! region, compared with the heavy-traffic value.

use htq::geometry::{SwitchGeometry, DEFAULT_FACET_TOL};
use htq::model::{
    iq_switch_channel, iq_switch_region, iq_uniform_nu, scale_to_heavy_traffic, ArrivalFamily,
    HeavyTrafficTarget, SwitchModel,
};
use htq::simulator::{run_switch, RunConfig};
use htq::theory::ht_limit;

fn main() -> htq::Result<()> {
    let channel = iq_switch_channel(2)?;
    let nu = iq_uniform_nu(2);
    let geom = SwitchGeometry::build(&channel, iq_switch_region(2)?, &nu, DEFAULT_FACET_TOL)?;
    let eps = 0.1;
    let arrivals = scale_to_heavy_traffic(
        &ArrivalFamily::Bernoulli { height: 1 },
        &HeavyTrafficTarget::Switch { nu: nu.clone() },
        eps,
    )?;
    let limit = ht_limit(&geom.cone.h, &arrivals.covariance, &geom.cone.gram_inv, &geom.spectrum.sigma_b, eps)?;
    let model = SwitchModel::new(arrivals.model, channel)?;
    let cfg = RunConfig { burn_in: 100_000, horizon: 5_000_000, seed: 3, ..RunConfig::default() };
    let rec = run_switch(&model, &geom, &cfg)?;
    println!("eps = {eps}");
    println!("E<q, nu>  = {:.4} +/- {:.4}", rec.mean_qw.mean, rec.mean_qw.half_width);
    println!("limit     = {limit:.4}");
    println!("E[sum q]  = {:.4} (twice the weighted sum since nu = 1/2)", rec.mean_sum_q.mean);
    for m in &rec.perp_k {
        println!("E|q_perp|^{} = {:.4}", m.order, m.estimate.mean);
    }
    Ok(())
}
