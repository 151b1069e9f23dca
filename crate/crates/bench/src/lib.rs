//! Deterministic workloads shared by the benchmarks.

use kedge::random::random_general_position;
use kedge::PointSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random integer point set in general position, fixed by `seed`.
pub fn workload(n: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_general_position(&mut rng, n, 10 * n as i64 + 100)
}
