//! Unbiased single-period controlled rounding.
//!
//! The fair share table gets one synthetic row that lifts every column total
//! to the next integer. Cycles of fractional cells are then split into two
//! tables, one raising the odd cells of the cycle and one raising the even
//! cells, and one of them is drawn with the probabilities that keep every
//! entry's expectation fixed. Dropping the synthetic row from the final
//! integral table yields a reservation table whose internal entries and
//! column totals are all adjacent integers of their fair shares.

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::table::{FairShareTable, ReservationTable};
use crate::rational::{ceil_int, floor_int, int, is_integral, Exact, Rational};
use crate::rng::bernoulli;

/// Fair share internals plus one synthetic row making column totals integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedTable {
    period: usize,
    /// `source_rows + 1` rows; the last one is synthetic.
    cells: Vec<Vec<Rational>>,
    column_totals: Vec<i64>,
    row_totals: Vec<i64>,
}

/// Adds the synthetic row `(1 - frac(x_{m+1,j})) mod 1`.
pub fn extend_table(fair: &FairShareTable) -> ExtendedTable {
    let synthetic: Vec<Rational> = fair
        .column_totals()
        .iter()
        .map(|c| int(ceil_int(c)) - c)
        .collect();
    let synthetic_total: Rational = synthetic.iter().sum();
    let mut cells = fair.internal().to_vec();
    cells.push(synthetic);
    let column_totals = fair.column_totals().iter().map(ceil_int).collect();
    let mut row_totals: Vec<i64> = fair.row_totals().iter().map(|r| r.to_integer()).collect();
    // Original rows and columns are integral, so the synthetic row is too.
    debug_assert!(is_integral(&synthetic_total));
    row_totals.push(synthetic_total.to_integer());
    ExtendedTable {
        period: fair.period(),
        cells,
        column_totals,
        row_totals,
    }
}

impl ExtendedTable {
    pub fn period(&self) -> usize {
        self.period
    }

    /// Rows including the synthetic one.
    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.column_totals.len()
    }

    pub fn source_rows(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn cells(&self) -> &[Vec<Rational>] {
        &self.cells
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        self.cells[i][j]
    }

    pub fn synthetic_row(&self) -> &[Rational] {
        self.cells.last().expect("extended tables always have a synthetic row")
    }

    pub fn column_totals(&self) -> &[i64] {
        &self.column_totals
    }

    pub fn row_totals(&self) -> &[i64] {
        &self.row_totals
    }

    pub fn is_fractional(&self, i: usize, j: usize) -> bool {
        !is_integral(&self.cells[i][j])
    }

    pub fn fraction_count(&self) -> usize {
        self.cells
            .iter()
            .flatten()
            .filter(|x| !is_integral(x))
            .count()
    }

    pub fn is_integral(&self) -> bool {
        self.cells.iter().flatten().all(is_integral)
    }

    /// Rows and columns still add up to their stored integer totals.
    pub fn is_additive(&self) -> bool {
        let rows_ok = self
            .cells
            .iter()
            .zip(&self.row_totals)
            .all(|(r, t)| r.iter().sum::<Rational>() == int(*t));
        let cols_ok = (0..self.cols())
            .all(|j| self.cells.iter().map(|r| r[j]).sum::<Rational>() == int(self.column_totals[j]));
        rows_ok && cols_ok
    }

    /// Drops the synthetic row of an integral table.
    pub fn into_reservation(self) -> Result<ReservationTable> {
        if !self.is_integral() {
            return Err(Error::Contract(
                "only an integral extended table can become a reservation table".into(),
            ));
        }
        let m = self.source_rows();
        let internal = self.cells[..m]
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer() as u64).collect())
            .collect();
        ReservationTable::from_internal(self.period, internal)
    }
}

/// Closed alternating path of fractional cells. Consecutive cells share a
/// row and a column in turn, and the last cell closes back onto the first.
/// Cells at 1-based odd positions are the "odd" cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionCycle {
    cells: Vec<(usize, usize)>,
}

impl FractionCycle {
    /// Validates a cycle of `(row, column)` cells (0-based) against `v`.
    pub fn new(cells: Vec<(usize, usize)>, v: &ExtendedTable) -> Result<Self> {
        let len = cells.len();
        if len < 4 || len % 2 != 0 {
            return Err(Error::DegenerateCycle(format!(
                "cycle has {len} cells, expected an even number of at least 4"
            )));
        }
        for (k, &(i, j)) in cells.iter().enumerate() {
            if i >= v.rows() || j >= v.cols() {
                return Err(Error::DegenerateCycle(format!("cell ({i}, {j}) out of range")));
            }
            if !v.is_fractional(i, j) {
                return Err(Error::DegenerateCycle(format!(
                    "cell ({i}, {j}) holds the integer {}",
                    Exact(&v.entry(i, j))
                )));
            }
            if cells[..k].contains(&(i, j)) {
                return Err(Error::DegenerateCycle(format!("cell ({i}, {j}) repeats")));
            }
        }
        let starts_in_row = cells[0].0 == cells[1].0;
        for k in 0..len {
            let (a, b) = (cells[k], cells[(k + 1) % len]);
            let row_step = (k % 2 == 0) == starts_in_row;
            let ok = if row_step {
                a.0 == b.0 && a.1 != b.1
            } else {
                a.1 == b.1 && a.0 != b.0
            };
            if !ok {
                return Err(Error::DegenerateCycle(format!(
                    "cells {a:?} and {b:?} do not alternate rows and columns"
                )));
            }
        }
        Ok(Self { cells })
    }

    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Whether the cell at 0-based `position` is an odd cell.
    pub fn is_odd(position: usize) -> bool {
        position % 2 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Row(usize),
    Col(usize),
}

/// Finds a cycle of fractional cells, or `None` when `v` is integral.
///
/// Starts at the row-major smallest fractional cell, leaves it along its
/// row, and from every row (column) steps to the smallest other fractional
/// cell of that row (column). The walk closes at the first revisited row or
/// column; cells before that point are discarded. The result always begins
/// with a row step.
pub fn find_fraction_cycle(v: &ExtendedTable) -> Option<FractionCycle> {
    let (i0, j0) = (0..v.rows())
        .flat_map(|i| (0..v.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| v.is_fractional(i, j))?;

    let mut row_seen = vec![usize::MAX; v.rows()];
    let mut col_seen = vec![usize::MAX; v.cols()];
    let mut nodes = vec![Node::Col(j0), Node::Row(i0)];
    let mut path = vec![(i0, j0)];
    col_seen[j0] = 0;
    row_seen[i0] = 1;

    loop {
        let &(li, lj) = path.last().expect("path starts non-empty");
        let (next_node, cell) = match *nodes.last().expect("nodes start non-empty") {
            Node::Row(i) => {
                let j = (0..v.cols()).find(|&j| j != lj && v.is_fractional(i, j))?;
                (Node::Col(j), (i, j))
            }
            Node::Col(j) => {
                let i = (0..v.rows()).find(|&i| i != li && v.is_fractional(i, j))?;
                (Node::Row(i), (i, j))
            }
        };
        let seen = match next_node {
            Node::Row(i) => row_seen[i],
            Node::Col(j) => col_seen[j],
        };
        path.push(cell);
        if seen != usize::MAX {
            let mut cells = path.split_off(seen);
            if matches!(nodes[seen], Node::Row(_)) {
                cells.rotate_left(1);
            }
            debug_assert!(FractionCycle::new(cells.clone(), v).is_ok());
            return Some(FractionCycle { cells });
        }
        let pos = nodes.len();
        match next_node {
            Node::Row(i) => row_seen[i] = pos,
            Node::Col(j) => col_seen[j] = pos,
        }
        nodes.push(next_node);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Odd cells raised by `d_plus`, even cells lowered by it.
    RaiseOdd,
    /// Even cells raised by `d_minus`, odd cells lowered by it.
    RaiseEven,
}

/// Both tables obtained by pushing along a cycle until a cell becomes integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSplit {
    pub raise_odd: ExtendedTable,
    pub raise_even: ExtendedTable,
    pub d_plus: Rational,
    pub d_minus: Rational,
}

impl CycleSplit {
    /// Probability of the raise-odd branch, `d_minus / (d_minus + d_plus)`.
    pub fn beta(&self) -> Rational {
        self.d_minus / (self.d_minus + self.d_plus)
    }

    /// `beta * V1 + (1 - beta) * V2`, entrywise.
    pub fn mixture(&self) -> Vec<Vec<Rational>> {
        let beta = self.beta();
        let rest = Rational::one() - beta;
        self.raise_odd
            .cells
            .iter()
            .zip(&self.raise_even.cells)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| beta * x + rest * y).collect())
            .collect()
    }
}

/// Materializes both branches of the decomposition along `cycle`.
pub fn split_on_cycle(v: &ExtendedTable, cycle: &FractionCycle) -> Result<CycleSplit> {
    let mut d_plus: Option<Rational> = None;
    let mut d_minus: Option<Rational> = None;
    let take_min = |slot: &mut Option<Rational>, x: Rational| {
        *slot = Some(slot.map_or(x, |s| s.min(x)));
    };
    for (p, &(i, j)) in cycle.cells().iter().enumerate() {
        let x = v.cells[i][j];
        let up = int(ceil_int(&x)) - x;
        let down = x - int(floor_int(&x));
        if FractionCycle::is_odd(p) {
            take_min(&mut d_plus, up);
            take_min(&mut d_minus, down);
        } else {
            take_min(&mut d_plus, down);
            take_min(&mut d_minus, up);
        }
    }
    let d_plus = d_plus.unwrap_or_else(Rational::zero);
    let d_minus = d_minus.unwrap_or_else(Rational::zero);
    if d_plus.is_zero() || d_minus.is_zero() {
        return Err(Error::DegenerateCycle(format!(
            "zero adjustment (d+ = {}, d- = {})",
            Exact(&d_plus),
            Exact(&d_minus)
        )));
    }
    let shifted = |amount: Rational| {
        let mut t = v.clone();
        for (p, &(i, j)) in cycle.cells().iter().enumerate() {
            if FractionCycle::is_odd(p) {
                t.cells[i][j] += amount;
            } else {
                t.cells[i][j] -= amount;
            }
        }
        t
    };
    Ok(CycleSplit {
        raise_odd: shifted(d_plus),
        raise_even: shifted(-d_minus),
        d_plus,
        d_minus,
    })
}

/// Record of one decomposition: adjustments, the branch drawn and its probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecompositionStep {
    pub d_plus: Rational,
    pub d_minus: Rational,
    pub branch: Branch,
    pub probability: Rational,
}

/// Draws one branch of the decomposition along `cycle`.
pub fn decompose_once<R: Rng + ?Sized>(
    v: &ExtendedTable,
    cycle: &FractionCycle,
    rng: &mut R,
) -> Result<(ExtendedTable, DecompositionStep)> {
    let split = split_on_cycle(v, cycle)?;
    let beta = split.beta();
    let (table, branch, probability) = if bernoulli(rng, *beta.numer(), *beta.denom()) {
        (split.raise_odd, Branch::RaiseOdd, beta)
    } else {
        (split.raise_even, Branch::RaiseEven, Rational::one() - beta)
    };
    Ok((
        table,
        DecompositionStep {
            d_plus: split.d_plus,
            d_minus: split.d_minus,
            branch,
            probability,
        },
    ))
}

/// A rounding draw together with the decomposition steps that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingRun {
    pub table: ReservationTable,
    pub steps: Vec<DecompositionStep>,
}

/// Rounds `fair` to a reservation table that stays within department and
/// university quota and equals `fair` in expectation.
pub fn controlled_round<R: Rng + ?Sized>(fair: &FairShareTable, rng: &mut R) -> ReservationTable {
    controlled_round_traced(fair, rng).table
}

pub fn controlled_round_traced<R: Rng + ?Sized>(fair: &FairShareTable, rng: &mut R) -> RoundingRun {
    let mut v = extend_table(fair);
    let mut steps = Vec::new();
    while let Some(cycle) = find_fraction_cycle(&v) {
        let (next, step) = decompose_once(&v, &cycle, rng)
            .expect("cycles found on an additive extended table are never degenerate");
        v = next;
        steps.push(step);
    }
    RoundingRun {
        table: v
            .into_reservation()
            .expect("the loop only exits on an integral table"),
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::quota::{within_department_quota, within_university_quota};
    use crate::rational::ratio;
    use crate::rng::from_seed;

    fn three_by_three() -> FairShareTable {
        FairShareTable::from_internal(
            1,
            vec![
                vec![ratio(1, 2), ratio(1, 2), int(1)],
                vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)],
                vec![ratio(3, 4), ratio(3, 4), ratio(3, 2)],
            ],
        )
        .unwrap()
    }

    fn two_by_two_first_period() -> FairShareTable {
        FairShareTable::from_internal(
            1,
            vec![
                vec![ratio(9, 10), ratio(81, 10)],
                vec![ratio(8, 10), ratio(72, 10)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn extension_adds_one_minus_fraction_row() {
        let v = extend_table(&three_by_three());
        assert_eq!(v.synthetic_row(), &[ratio(1, 2), ratio(1, 2), int(0)]);
        assert_eq!(v.column_totals(), &[2, 2, 3]);
        assert_eq!(v.row_totals(), &[2, 1, 3, 1]);
        assert!(v.is_additive());

        let v = extend_table(&two_by_two_first_period());
        assert_eq!(v.synthetic_row(), &[ratio(3, 10), ratio(7, 10)]);
        assert_eq!(v.column_totals(), &[2, 16]);
    }

    #[test]
    fn integral_table_gets_zero_row() {
        let fair = FairShareTable::from_internal(1, vec![vec![int(2), int(4)], vec![int(1), int(2)]])
            .unwrap();
        let v = extend_table(&fair);
        assert_eq!(v.synthetic_row(), &[int(0), int(0)]);
        assert!(find_fraction_cycle(&v).is_none());
        let mut rng = from_seed(3);
        let out = controlled_round(&fair, &mut rng);
        assert_eq!(out.internal(), &[vec![2, 4], vec![1, 2]]);
    }

    #[test]
    fn eight_cell_cycle_split() {
        let v = extend_table(&three_by_three());
        let cycle = FractionCycle::new(
            vec![(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 1), (3, 1), (3, 0)],
            &v,
        )
        .unwrap();
        let split = split_on_cycle(&v, &cycle).unwrap();
        assert_eq!(split.d_plus, ratio(1, 2));
        assert_eq!(split.d_minus, ratio(1, 4));
        assert_eq!(split.beta(), ratio(1, 3));
        let v1 = [
            [int(1), int(0), int(1)],
            [ratio(1, 4), ratio(3, 4), int(0)],
            [ratio(3, 4), ratio(1, 4), int(2)],
            [int(0), int(1), int(0)],
        ];
        let v2 = [
            [ratio(1, 4), ratio(3, 4), int(1)],
            [ratio(1, 4), int(0), ratio(3, 4)],
            [ratio(3, 4), int(1), ratio(5, 4)],
            [ratio(3, 4), ratio(1, 4), int(0)],
        ];
        for i in 0..4 {
            assert_eq!(split.raise_odd.cells()[i], v1[i]);
            assert_eq!(split.raise_even.cells()[i], v2[i]);
        }
        assert_eq!(split.mixture(), v.cells());
    }

    #[test]
    fn malformed_cycles_are_rejected() {
        let v = extend_table(&three_by_three());
        // (0,2) holds an integer
        assert!(FractionCycle::new(vec![(0, 0), (0, 2), (1, 2), (1, 0)], &v).is_err());
        // not alternating
        assert!(FractionCycle::new(vec![(0, 0), (0, 1), (3, 1), (2, 0)], &v).is_err());
        assert!(FractionCycle::new(vec![(0, 0), (0, 1)], &v).is_err());
    }

    #[test]
    fn found_cycle_is_canonical_and_deterministic() {
        let v = extend_table(&three_by_three());
        let c = find_fraction_cycle(&v).unwrap();
        assert_eq!(c.cells(), &[(0, 0), (0, 1), (1, 1), (1, 0)]);
        assert_eq!(find_fraction_cycle(&v), Some(c));

        let v = extend_table(&two_by_two_first_period());
        let c = find_fraction_cycle(&v).unwrap();
        assert_eq!(c.len(), 4);
        assert!(FractionCycle::new(c.cells().to_vec(), &v).is_ok());
    }

    #[test]
    fn symmetric_square_splits_evenly() {
        let fair = FairShareTable::from_internal(
            1,
            vec![vec![ratio(1, 2), ratio(1, 2)], vec![ratio(1, 2), ratio(1, 2)]],
        )
        .unwrap();
        let v = extend_table(&fair);
        let c = find_fraction_cycle(&v).unwrap();
        let split = split_on_cycle(&v, &c).unwrap();
        assert_eq!(split.d_plus, ratio(1, 2));
        assert_eq!(split.d_minus, ratio(1, 2));
        assert_eq!(split.beta(), ratio(1, 2));
    }

    #[test]
    fn every_draw_stays_within_quota() {
        let fair = three_by_three();
        for seed in 0..200 {
            let mut rng = from_seed(seed);
            let run = controlled_round_traced(&fair, &mut rng);
            assert!(run.steps.len() <= extend_table(&fair).fraction_count());
            assert!(within_department_quota(&run.table, &fair).unwrap().is_empty());
            assert!(within_university_quota(&run.table, &fair).unwrap().is_empty());
            for s in &run.steps {
                assert_eq!(
                    s.probability,
                    match s.branch {
                        Branch::RaiseOdd => s.d_minus / (s.d_minus + s.d_plus),
                        Branch::RaiseEven => s.d_plus / (s.d_minus + s.d_plus),
                    }
                );
            }
        }
    }

    #[test]
    fn draws_are_reproducible() {
        let fair = two_by_two_first_period();
        let a = controlled_round(&fair, &mut from_seed(42));
        let b = controlled_round(&fair, &mut from_seed(42));
        assert_eq!(a, b);
        assert_eq!(a.row_totals(), &[9, 8]);
    }
}
