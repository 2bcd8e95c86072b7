//! Two-way tables with department rows, category columns and redundant
//! totals. Totals are stored and validated on construction so that
//! non-additive input is rejected immediately.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::problem::ReservationProblem;
use crate::rational::{int, is_integral, Exact, Rational};

fn check_rectangular<T>(internal: &[Vec<T>]) -> Result<usize> {
    let cols = internal.first().map_or(0, Vec::len);
    if internal.is_empty() || cols == 0 {
        return Err(Error::Shape("table needs at least one row and one column".into()));
    }
    if let Some((i, row)) = internal.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(Error::Shape(format!(
            "row {} has {} entries, expected {cols}",
            i + 1,
            row.len()
        )));
    }
    Ok(cols)
}

/// Period-`t` fair share table: `x_ij = alpha_j * Q_i^t` with totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairShareTable {
    period: usize,
    internal: Vec<Vec<Rational>>,
    row_totals: Vec<Rational>,
    column_totals: Vec<Rational>,
    grand_total: Rational,
}

impl FairShareTable {
    /// Builds the exact fair share table of `problem` at period `t`.
    pub fn for_period(problem: &ReservationProblem, t: usize) -> Result<Self> {
        let cumulative = problem.cumulative(t)?;
        let alpha = problem.scheme().fractions();
        let internal = cumulative
            .iter()
            .map(|&q| alpha.iter().map(|a| a * int(q as i64)).collect())
            .collect();
        Self::from_internal(t, internal)
    }

    /// Derives the totals from the internal entries.
    pub fn from_internal(period: usize, internal: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = check_rectangular(&internal)?;
        let row_totals: Vec<Rational> = internal.iter().map(|r| r.iter().sum()).collect();
        let column_totals: Vec<Rational> = (0..cols)
            .map(|j| internal.iter().map(|r| r[j]).sum())
            .collect();
        let grand_total = row_totals.iter().sum();
        Self::new(period, internal, row_totals, column_totals, grand_total)
    }

    pub fn new(
        period: usize,
        internal: Vec<Vec<Rational>>,
        row_totals: Vec<Rational>,
        column_totals: Vec<Rational>,
        grand_total: Rational,
    ) -> Result<Self> {
        let cols = check_rectangular(&internal)?;
        if row_totals.len() != internal.len() || column_totals.len() != cols {
            return Err(Error::Shape("totals do not match the internal dimensions".into()));
        }
        for (i, row) in internal.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if x.is_negative() {
                    return Err(Error::InvalidProblem(format!(
                        "negative fair share {} at ({}, {})",
                        Exact(x),
                        i + 1,
                        j + 1
                    )));
                }
            }
            let sum: Rational = row.iter().sum();
            if sum != row_totals[i] {
                return Err(Error::NotAdditive(format!(
                    "row {} sums to {} but its total is {}",
                    i + 1,
                    Exact(&sum),
                    Exact(&row_totals[i])
                )));
            }
            if !is_integral(&row_totals[i]) {
                return Err(Error::InvalidProblem(format!(
                    "row total {} of row {} is not an integer",
                    Exact(&row_totals[i]),
                    i + 1
                )));
            }
        }
        for (j, total) in column_totals.iter().enumerate() {
            let sum: Rational = internal.iter().map(|r| r[j]).sum();
            if sum != *total {
                return Err(Error::NotAdditive(format!(
                    "column {} sums to {} but its total is {}",
                    j + 1,
                    Exact(&sum),
                    Exact(total)
                )));
            }
        }
        let sum: Rational = row_totals.iter().sum();
        let col_sum: Rational = column_totals.iter().sum();
        if sum != grand_total || col_sum != grand_total {
            return Err(Error::NotAdditive(format!(
                "grand total {} disagrees with the row and column totals",
                Exact(&grand_total)
            )));
        }
        Ok(Self {
            period,
            internal,
            row_totals,
            column_totals,
            grand_total,
        })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn rows(&self) -> usize {
        self.internal.len()
    }

    pub fn cols(&self) -> usize {
        self.column_totals.len()
    }

    pub fn internal(&self) -> &[Vec<Rational>] {
        &self.internal
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        self.internal[i][j]
    }

    pub fn row_totals(&self) -> &[Rational] {
        &self.row_totals
    }

    pub fn column_totals(&self) -> &[Rational] {
        &self.column_totals
    }

    pub fn grand_total(&self) -> Rational {
        self.grand_total
    }

    /// Row totals as integers (they always are).
    pub fn integral_row_totals(&self) -> Vec<u64> {
        self.row_totals.iter().map(|r| r.to_integer() as u64).collect()
    }
}

/// Period-`t` reservation table: nonnegative integer seat counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReservationTable {
    period: usize,
    internal: Vec<Vec<u64>>,
    row_totals: Vec<u64>,
    column_totals: Vec<u64>,
    grand_total: u64,
}

impl ReservationTable {
    pub fn from_internal(period: usize, internal: Vec<Vec<u64>>) -> Result<Self> {
        let cols = check_rectangular(&internal)?;
        let row_totals: Vec<u64> = internal.iter().map(|r| r.iter().sum()).collect();
        let column_totals: Vec<u64> = (0..cols)
            .map(|j| internal.iter().map(|r| r[j]).sum())
            .collect();
        let grand_total = row_totals.iter().sum();
        Ok(Self {
            period,
            internal,
            row_totals,
            column_totals,
            grand_total,
        })
    }

    /// Validating constructor for tables whose totals come from outside.
    pub fn new(
        period: usize,
        internal: Vec<Vec<u64>>,
        row_totals: Vec<u64>,
        column_totals: Vec<u64>,
        grand_total: u64,
    ) -> Result<Self> {
        let derived = Self::from_internal(period, internal)?;
        if derived.row_totals != row_totals {
            return Err(Error::NotAdditive(format!(
                "row sums {:?} disagree with row totals {row_totals:?}",
                derived.row_totals
            )));
        }
        if derived.column_totals != column_totals {
            return Err(Error::NotAdditive(format!(
                "column sums {:?} disagree with column totals {column_totals:?}",
                derived.column_totals
            )));
        }
        if derived.grand_total != grand_total {
            return Err(Error::NotAdditive(format!(
                "grand total {grand_total} disagrees with the sum {}",
                derived.grand_total
            )));
        }
        Ok(derived)
    }

    /// An all-zero table of the given shape.
    pub fn zeros(period: usize, rows: usize, cols: usize) -> Self {
        Self {
            period,
            internal: vec![vec![0; cols]; rows],
            row_totals: vec![0; rows],
            column_totals: vec![0; cols],
            grand_total: 0,
        }
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn rows(&self) -> usize {
        self.internal.len()
    }

    pub fn cols(&self) -> usize {
        self.column_totals.len()
    }

    pub fn internal(&self) -> &[Vec<u64>] {
        &self.internal
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.internal[i][j]
    }

    pub fn row_totals(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn column_totals(&self) -> &[u64] {
        &self.column_totals
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    /// Checks dimensions, period and the row-total invariant against `fair`.
    pub fn check_matches(&self, fair: &FairShareTable) -> Result<()> {
        if self.rows() != fair.rows() || self.cols() != fair.cols() {
            return Err(Error::Shape(format!(
                "reservation table is {}x{} but fair share table is {}x{}",
                self.rows(),
                self.cols(),
                fair.rows(),
                fair.cols()
            )));
        }
        if self.period != fair.period() {
            return Err(Error::Shape(format!(
                "reservation table is for period {} but fair share table is for period {}",
                self.period,
                fair.period()
            )));
        }
        for (i, (r, x)) in self.row_totals.iter().zip(fair.row_totals()).enumerate() {
            if int(*r as i64) != *x {
                return Err(Error::Shape(format!(
                    "row {} reserves {r} seats but has {} vacancies",
                    i + 1,
                    Exact(x)
                )));
            }
        }
        Ok(())
    }

    /// Entrywise `self >= other`, totals included.
    pub fn dominates(&self, other: &ReservationTable) -> bool {
        self.rows() == other.rows()
            && self.cols() == other.cols()
            && self
                .internal
                .iter()
                .flatten()
                .zip(other.internal.iter().flatten())
                .all(|(a, b)| a >= b)
            && self
                .column_totals
                .iter()
                .zip(&other.column_totals)
                .all(|(a, b)| a >= b)
            && self.row_totals.iter().zip(&other.row_totals).all(|(a, b)| a >= b)
            && self.grand_total >= other.grand_total
    }
}

/// Entrywise difference between a reservation table and its fair share table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasTable {
    period: usize,
    internal: Vec<Vec<Rational>>,
    row_totals: Vec<Rational>,
    column_totals: Vec<Rational>,
    grand_total: Rational,
}

impl BiasTable {
    pub(crate) fn between(res: &ReservationTable, fair: &FairShareTable) -> Result<Self> {
        res.check_matches(fair)?;
        let diff = |a: u64, b: &Rational| int(a as i64) - b;
        let internal = res
            .internal
            .iter()
            .zip(fair.internal())
            .map(|(r, f)| r.iter().zip(f).map(|(a, b)| diff(*a, b)).collect())
            .collect();
        let row_totals = res
            .row_totals
            .iter()
            .zip(fair.row_totals())
            .map(|(a, b)| diff(*a, b))
            .collect();
        let column_totals = res
            .column_totals
            .iter()
            .zip(fair.column_totals())
            .map(|(a, b)| diff(*a, b))
            .collect();
        let grand_total = diff(res.grand_total, &fair.grand_total());
        Ok(Self {
            period: res.period,
            internal,
            row_totals,
            column_totals,
            grand_total,
        })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn internal(&self) -> &[Vec<Rational>] {
        &self.internal
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        self.internal[i][j]
    }

    pub fn row_totals(&self) -> &[Rational] {
        &self.row_totals
    }

    pub fn column_totals(&self) -> &[Rational] {
        &self.column_totals
    }

    pub fn grand_total(&self) -> Rational {
        self.grand_total
    }

    /// Largest absolute internal bias.
    pub fn max_abs_internal(&self) -> Rational {
        self.internal
            .iter()
            .flatten()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Largest absolute column-total bias.
    pub fn max_abs_column(&self) -> Rational {
        self.column_totals
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Every entry, totals included, has absolute value below one.
    pub fn all_below_one(&self) -> bool {
        let one = int(1);
        self.internal
            .iter()
            .flatten()
            .chain(&self.row_totals)
            .chain(&self.column_totals)
            .chain(std::iter::once(&self.grand_total))
            .all(|b| b.abs() < one)
    }
}
