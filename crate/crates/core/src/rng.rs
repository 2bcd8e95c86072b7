//! Seeded random streams. All randomness in the crate flows through
//! [`DrawRng`], a ChaCha20 generator whose output is stable across releases.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type DrawRng = ChaCha20Rng;

/// Recorded in report metadata so draws can be reproduced.
pub const RNG_NAME: &str = "chacha20/rand_chacha-0.9/seed_from_u64";

/// Stream reserved for deriving replication seeds.
const REPLICATION_STREAM: u64 = u64::MAX;

pub fn from_seed(seed: u64) -> DrawRng {
    DrawRng::seed_from_u64(seed)
}

/// Independent stream for department `index` under a master seed. Adding a
/// department never changes the draws of the others.
pub fn department_stream(seed: u64, index: usize) -> DrawRng {
    let mut rng = DrawRng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Master seeds for `count` replications, derived deterministically from `seed`.
pub fn replication_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = DrawRng::seed_from_u64(seed);
    rng.set_stream(REPLICATION_STREAM);
    (0..count).map(|_| rng.next_u64()).collect()
}

/// Exact Bernoulli draw with success probability `numer / denom`, using one
/// uniform integer.
pub fn bernoulli<R: Rng + ?Sized>(rng: &mut R, numer: i64, denom: i64) -> bool {
    debug_assert!(denom > 0 && (0..=denom).contains(&numer));
    rng.random_range(0..denom) < numer
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn department_streams_are_independent_of_department_count() {
        let a: Vec<u64> = (0..4).map(|_| department_stream(7, 3).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(
            department_stream(7, 3).next_u64(),
            department_stream(7, 4).next_u64()
        );
    }

    #[test]
    fn replication_seeds_are_reproducible() {
        assert_eq!(replication_seeds(11, 5), replication_seeds(11, 5));
        assert_eq!(replication_seeds(11, 5)[..3], replication_seeds(11, 3)[..]);
    }

    #[test]
    fn bernoulli_edges() {
        let mut rng = from_seed(1);
        assert!((0..100).all(|_| !bernoulli(&mut rng, 0, 3)));
        assert!((0..100).all(|_| bernoulli(&mut rng, 3, 3)));
    }
}
