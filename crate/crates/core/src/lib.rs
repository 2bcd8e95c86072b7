//! Affirmative-action seat reservations in two dimensions.
//!
//! Departments (rows) and beneficiary categories (columns) receive seats
//! over several periods. The crate provides
//!
//! * exact fair share and reservation tables with the within-quota
//!   predicates ([`model`]),
//! * unbiased single-period controlled rounding ([`controlled_rounding`]),
//! * random rosters drawn by decomposing a laminar flow network
//!   ([`roster_flow`]),
//! * the government, court and random-roster multi-period solutions
//!   ([`solutions`]),
//! * violation statistics, bias traces, tail diagnostics and the adversarial
//!   sequence showing that no university-quota solution has finite bias
//!   ([`analysis`]).

pub mod analysis;
pub mod controlled_rounding;
pub mod error;
pub mod model;
pub mod rational;
pub mod rng;
pub mod roster_flow;
pub mod solutions;

pub use error::{Error, Result};
pub use model::{
    FairShareTable, ReservationProblem, ReservationScheme, ReservationTable, Roster,
    SolutionKind, SolutionTrace,
};
pub use rational::Rational;
