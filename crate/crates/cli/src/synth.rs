//! Synthetic multi-period problems for comparisons when no real data exists.

use std::ops::RangeInclusive;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand::SeedableRng;

use reserve_core::rational::ratio;
use reserve_core::{ReservationProblem, ReservationScheme};

/// Stream of the master seed used for generating problems; replication
/// seeds use a different one.
const SYNTH_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub periods: usize,
    pub departments: RangeInclusive<usize>,
    /// Vacancies per department per period.
    pub vacancies: RangeInclusive<u64>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            periods: 9,
            departments: 8..=50,
            vacancies: 1..=30,
        }
    }
}

/// Five-category national scheme: 15%, 7.5%, 27%, 10% and the remaining 40.5%.
pub fn national_scheme() -> ReservationScheme {
    ReservationScheme::new(
        ["SC", "ST", "OBC", "EWS", "GEN"],
        [ratio(3, 20), ratio(3, 40), ratio(27, 100), ratio(1, 10), ratio(81, 200)],
    )
    .expect("the national scheme is valid")
}

/// Draws a department count and per-period vacancies uniformly from `config`.
pub fn synthesize(config: &SynthConfig, scheme: ReservationScheme, seed: u64) -> ReservationProblem {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(SYNTH_STREAM);
    let m = rng.random_range(config.departments.clone());
    let width = m.to_string().len();
    let names: Vec<String> = (1..=m).map(|i| format!("dept{i:0width$}")).collect();
    let vacancies = (0..config.periods.max(1))
        .map(|_| (0..m).map(|_| rng.random_range(config.vacancies.clone())).collect())
        .collect();
    ReservationProblem::new(names, scheme, vacancies).expect("synthetic problems are valid")
}
