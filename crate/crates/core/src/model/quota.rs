//! Within-quota predicates and bias. A reservation `r` is within quota of a
//! fair share `x` when `r` is `floor(x)` or `ceil(x)`; an integral `x`
//! admits only itself.

use crate::error::Result;
use crate::model::table::{BiasTable, FairShareTable, ReservationTable};
use crate::rational::{ceil_int, floor_int, Rational};

/// An internal cell whose reservation is not an adjacent integer of its fair share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepartmentViolation {
    pub department: usize,
    pub category: usize,
    pub reserved: u64,
    pub fair_share: Rational,
}

/// A column total whose reservation is not an adjacent integer of its fair share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversityViolation {
    pub category: usize,
    pub reserved: u64,
    pub fair_share: Rational,
}

pub fn is_within(reserved: u64, fair_share: &Rational) -> bool {
    let r = reserved as i64;
    r == floor_int(fair_share) || r == ceil_int(fair_share)
}

/// Internal cells that fall outside `{floor(x_ij), ceil(x_ij)}`.
pub fn within_department_quota(
    res: &ReservationTable,
    fair: &FairShareTable,
) -> Result<Vec<DepartmentViolation>> {
    res.check_matches(fair)?;
    let mut out = Vec::new();
    for (i, (row, fair_row)) in res.internal().iter().zip(fair.internal()).enumerate() {
        for (j, (r, x)) in row.iter().zip(fair_row).enumerate() {
            if !is_within(*r, x) {
                out.push(DepartmentViolation {
                    department: i,
                    category: j,
                    reserved: *r,
                    fair_share: *x,
                });
            }
        }
    }
    Ok(out)
}

/// Column totals that fall outside `{floor(x_j), ceil(x_j)}`.
pub fn within_university_quota(
    res: &ReservationTable,
    fair: &FairShareTable,
) -> Result<Vec<UniversityViolation>> {
    res.check_matches(fair)?;
    Ok(res
        .column_totals()
        .iter()
        .zip(fair.column_totals())
        .enumerate()
        .filter(|(_, (r, x))| !is_within(**r, x))
        .map(|(j, (r, x))| UniversityViolation {
            category: j,
            reserved: *r,
            fair_share: *x,
        })
        .collect())
}

/// `res - fair`, entrywise and exact.
pub fn bias_of(res: &ReservationTable, fair: &FairShareTable) -> Result<BiasTable> {
    BiasTable::between(res, fair)
}
