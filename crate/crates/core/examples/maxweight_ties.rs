//! MaxWeight picks uniformly among tied schedules; the assignment solver finds
//! the same maximum weight for input-queued switches.

use htq::model::ServiceSet;
use htq::scheduling::{maxweight, maxweight_matching, permutation_to_service};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> htq::Result<()> {
    let services = ServiceSet::with_projections(2, &[vec![1, 0], vec![0, 1]])?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let q = [3i64, 3];
    let draws = 100_000;
    let first = (0..draws)
        .filter(|_| maxweight(&q, &services, &mut rng).s == [1, 0])
        .count();
    println!("q = {q:?}: served queue 1 in {:.3} of slots", first as f64 / draws as f64);

    let q = [5i64, 1, 2, 4];
    let m = maxweight_matching(&q, 2);
    println!("2x2 queues {q:?}: matching {:?} with weight {}", m.perm, m.weight);
    println!("service vector {:?}", permutation_to_service(&m.perm));
    Ok(())
}
