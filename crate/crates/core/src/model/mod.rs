//! Problems, tables, rosters and the quota predicates every algorithm is
//! checked against.

pub mod problem;
pub mod quota;
pub mod roster;
pub mod scheme;
pub mod table;
pub mod trace;

pub use problem::ReservationProblem;
pub use quota::{
    bias_of, within_department_quota, within_university_quota, DepartmentViolation,
    UniversityViolation,
};
pub use roster::{ExtensionPolicy, Roster};
pub use scheme::ReservationScheme;
pub use table::{BiasTable, FairShareTable, ReservationTable};
pub use trace::{SolutionKind, SolutionTrace};
