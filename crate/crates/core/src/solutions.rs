//! Multi-period solutions: the government and court roster baselines and the
//! proposed random-roster solution, plus Monte Carlo estimation of expected
//! reservation tables.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::roster::{ExtensionPolicy, Roster};
use crate::model::table::{FairShareTable, ReservationTable};
use crate::model::trace::{SolutionKind, SolutionTrace};
use crate::model::ReservationProblem;
use crate::rational::Rational;
use crate::rng::{department_stream, replication_seeds};
use crate::roster_flow::RosterSampler;

/// Order in which departments draw from the pooled government roster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DepartmentOrder {
    /// The problem's department order.
    #[default]
    Input,
    /// Departments sorted by identifier; ties keep input order.
    Alphabetic,
}

impl DepartmentOrder {
    pub fn label(self) -> &'static str {
        match self {
            DepartmentOrder::Input => "input",
            DepartmentOrder::Alphabetic => "alpha",
        }
    }

    /// Department indices in pooling order.
    pub fn resolve(self, problem: &ReservationProblem) -> Vec<usize> {
        let mut order: Vec<usize> = (0..problem.department_count()).collect();
        if self == DepartmentOrder::Alphabetic {
            order.sort_by(|&a, &b| problem.departments()[a].cmp(&problem.departments()[b]));
        }
        order
    }
}

/// What happens when a baseline needs a position past the roster's end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RosterMode {
    /// Reuse the roster cyclically.
    #[default]
    Cycle,
    /// Fail with [`Error::RosterExhausted`].
    Strict,
}

/// Category lookup for one roster with its categories mapped into the scheme.
struct RosterView<'a> {
    roster: &'a Roster,
    map: Vec<usize>,
    mode: RosterMode,
}

impl<'a> RosterView<'a> {
    fn new(roster: &'a Roster, problem: &ReservationProblem, mode: RosterMode) -> Result<Self> {
        Ok(Self {
            roster,
            map: roster.category_map(problem.scheme())?,
            mode,
        })
    }

    /// Scheme category of 1-based `position`.
    fn category(&self, position: usize) -> Result<usize> {
        let len = self.roster.len();
        let idx = match self.mode {
            RosterMode::Strict if position > len => None,
            RosterMode::Strict => self.roster.index_at(position),
            RosterMode::Cycle => self
                .roster
                .index_at(position)
                .or_else(|| self.roster.index_at((position - 1) % len + 1)),
        };
        idx.map(|c| self.map[c])
            .ok_or(Error::RosterExhausted { position, length: len })
    }
}

fn assemble(
    problem: &ReservationProblem,
    kind: SolutionKind,
    seed: Option<u64>,
    tables: Vec<Vec<Vec<u64>>>,
) -> Result<SolutionTrace> {
    let periods = tables
        .into_iter()
        .enumerate()
        .map(|(s, internal)| {
            Ok((
                FairShareTable::for_period(problem, s + 1)?,
                ReservationTable::from_internal(s + 1, internal)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    SolutionTrace::new(kind, seed, periods)
}

/// University as the unit: one pooled roster, departments draw consecutive
/// positions in `order` each period, and the position index carries over
/// between periods.
pub fn run_government(
    problem: &ReservationProblem,
    roster: &Roster,
    order: DepartmentOrder,
    mode: RosterMode,
) -> Result<SolutionTrace> {
    run_government_in_order(problem, roster, &order.resolve(problem), mode)
}

/// [`run_government`] with an explicit permutation of department indices.
pub fn run_government_in_order(
    problem: &ReservationProblem,
    roster: &Roster,
    order: &[usize],
    mode: RosterMode,
) -> Result<SolutionTrace> {
    let m = problem.department_count();
    let mut seen = vec![false; m];
    if order.len() != m || !order.iter().all(|&i| i < m && !std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidProblem(format!(
            "pooling order must be a permutation of 0..{m}"
        )));
    }
    let view = RosterView::new(roster, problem, mode)?;
    let mut table = vec![vec![0u64; problem.category_count()]; m];
    let mut position = 0usize;
    let mut tables = Vec::with_capacity(problem.periods());
    for t in 1..=problem.periods() {
        let q = problem.vacancies(t)?;
        for &i in order {
            for _ in 0..q[i] {
                position += 1;
                table[i][view.category(position)?] += 1;
            }
        }
        tables.push(table.clone());
    }
    assemble(problem, SolutionKind::Government, None, tables)
}

/// Department `i` reserves positions `Q^{t-1}_i + 1 ..= Q^t_i` of `rosters[i]`.
fn per_department(
    problem: &ReservationProblem,
    rosters: &[RosterView<'_>],
) -> Result<Vec<Vec<Vec<u64>>>> {
    let m = problem.department_count();
    let mut table = vec![vec![0u64; problem.category_count()]; m];
    let mut used = vec![0usize; m];
    let mut tables = Vec::with_capacity(problem.periods());
    for t in 1..=problem.periods() {
        let q = problem.vacancies(t)?;
        for i in 0..m {
            for _ in 0..q[i] {
                used[i] += 1;
                table[i][rosters[i].category(used[i])?] += 1;
            }
        }
        tables.push(table.clone());
    }
    Ok(tables)
}

/// Department as the unit: every department walks its own copy of `roster`.
pub fn run_court(
    problem: &ReservationProblem,
    roster: &Roster,
    mode: RosterMode,
) -> Result<SolutionTrace> {
    let view = RosterView::new(roster, problem, mode)?;
    let views: Vec<RosterView<'_>> = (0..problem.department_count())
        .map(|_| RosterView {
            roster: view.roster,
            map: view.map.clone(),
            mode,
        })
        .collect();
    let tables = per_department(problem, &views)?;
    assemble(problem, SolutionKind::Court, None, tables)
}

/// One random roster per department, long enough for its cumulative
/// vacancies; department `i` uses stream `i` of `seed`.
pub fn proposed_rosters(problem: &ReservationProblem, seed: u64) -> Vec<Roster> {
    let sampler = RosterSampler::new(problem.scheme());
    let totals = problem.total_vacancies();
    (0..problem.department_count())
        .map(|i| {
            let mut rng = department_stream(seed, i);
            sampler.draw_roster(totals[i] as usize, &mut rng, ExtensionPolicy::IndependentBlocks)
        })
        .collect()
}

/// The proposed solution: independent random rosters consumed court-style.
pub fn run_proposed(problem: &ReservationProblem, seed: u64) -> Result<SolutionTrace> {
    let rosters = proposed_rosters(problem, seed);
    let views = rosters
        .iter()
        .map(|r| RosterView::new(r, problem, RosterMode::Strict))
        .collect::<Result<Vec<_>>>()?;
    let tables = per_department(problem, &views)?;
    assemble(problem, SolutionKind::Proposed, Some(seed), tables)
}

/// Period-`t` table of the proposed solution without building the trace.
pub fn proposed_table(problem: &ReservationProblem, t: usize, seed: u64) -> Result<ReservationTable> {
    let cumulative = problem.cumulative(t)?;
    let sampler = RosterSampler::new(problem.scheme());
    let n = problem.category_count();
    let internal = cumulative
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let mut rng = department_stream(seed, i);
            let mut row = vec![0u64; n];
            let mut left = q as usize;
            while left > 0 {
                let block = sampler.draw_block(&mut rng);
                for &c in block.assignment().iter().take(left) {
                    row[c] += 1;
                }
                left = left.saturating_sub(block.len());
            }
            row
        })
        .collect();
    ReservationTable::from_internal(t, internal)
}

/// A solution together with the inputs it needs besides the problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionConfig {
    Government {
        roster: Roster,
        order: DepartmentOrder,
        mode: RosterMode,
    },
    Court {
        roster: Roster,
        mode: RosterMode,
    },
    Proposed,
}

impl SolutionConfig {
    pub fn kind(&self) -> SolutionKind {
        match self {
            SolutionConfig::Government { .. } => SolutionKind::Government,
            SolutionConfig::Court { .. } => SolutionKind::Court,
            SolutionConfig::Proposed => SolutionKind::Proposed,
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, SolutionConfig::Proposed)
    }

    /// Runs the solution; `seed` is ignored by the deterministic baselines.
    pub fn run(&self, problem: &ReservationProblem, seed: u64) -> Result<SolutionTrace> {
        match self {
            SolutionConfig::Government {
                roster,
                order,
                mode,
            } => run_government(problem, roster, *order, *mode),
            SolutionConfig::Court { roster, mode } => run_court(problem, roster, *mode),
            SolutionConfig::Proposed => run_proposed(problem, seed),
        }
    }

    /// Period-`t` reservation table only.
    pub fn table_at(&self, problem: &ReservationProblem, t: usize, seed: u64) -> Result<ReservationTable> {
        match self {
            SolutionConfig::Proposed => proposed_table(problem, t, seed),
            _ => {
                problem.check_period(t)?;
                Ok(self.run(problem, seed)?.period(t).expect("period checked").1.clone())
            }
        }
    }
}

/// Empirical mean of a random reservation table with per-entry standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedTable {
    pub period: usize,
    pub replications: usize,
    pub mean: Vec<Vec<Rational>>,
    pub column_mean: Vec<Rational>,
    /// Standard error of each internal mean, `s / sqrt(N)`.
    pub se: Vec<Vec<f64>>,
    pub column_se: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Moments {
    sum: Vec<i64>,
    sum_sq: Vec<u128>,
}

impl Moments {
    fn zeros(len: usize) -> Self {
        Self {
            sum: vec![0; len],
            sum_sq: vec![0; len],
        }
    }

    fn add(mut self, values: &[u64]) -> Self {
        for (k, &v) in values.iter().enumerate() {
            self.sum[k] += v as i64;
            self.sum_sq[k] += u128::from(v) * u128::from(v);
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for k in 0..self.sum.len() {
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
        }
        self
    }

    fn mean(&self, k: usize, n: usize) -> Rational {
        Rational::new(self.sum[k], n as i64)
    }

    fn se(&self, k: usize, n: usize) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let nf = n as f64;
        let mean = self.sum[k] as f64 / nf;
        let var = ((self.sum_sq[k] as f64 - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    }
}

/// Averages `replications` tables drawn by `draw` in parallel; replication
/// `r` receives the `r`-th seed derived from `seed`. The result does not
/// depend on thread scheduling.
pub fn estimate_mean<F>(replications: usize, seed: u64, draw: F) -> Result<ExpectedTable>
where
    F: Fn(u64) -> Result<ReservationTable> + Sync,
{
    if replications == 0 {
        return Err(Error::Contract("at least one replication is required".into()));
    }
    let seeds = replication_seeds(seed, replications);
    let first = draw(seeds[0])?;
    let (m, n) = (first.rows(), first.cols());
    let width = m * n + n;
    let flatten = |t: &ReservationTable| -> Vec<u64> {
        t.internal()
            .iter()
            .flatten()
            .chain(t.column_totals())
            .copied()
            .collect()
    };
    let moments = seeds[1..]
        .par_iter()
        .map(|&s| draw(s))
        .try_fold(
            || Moments::zeros(width),
            |acc, t| -> Result<Moments> {
                let t = t?;
                if t.rows() != m || t.cols() != n {
                    return Err(Error::Shape("replications disagree on table shape".into()));
                }
                Ok(acc.add(&flatten(&t)))
            },
        )
        .try_reduce(|| Moments::zeros(width), |a, b| Ok(a.merge(b)))?
        .add(&flatten(&first));
    let r = replications;
    Ok(ExpectedTable {
        period: first.period(),
        replications: r,
        mean: (0..m)
            .map(|i| (0..n).map(|j| moments.mean(i * n + j, r)).collect())
            .collect(),
        column_mean: (0..n).map(|j| moments.mean(m * n + j, r)).collect(),
        se: (0..m)
            .map(|i| (0..n).map(|j| moments.se(i * n + j, r)).collect())
            .collect(),
        column_se: (0..n).map(|j| moments.se(m * n + j, r)).collect(),
    })
}

/// Monte Carlo estimate of the expected period-`t` table of `config`.
pub fn estimate_expected_table(
    problem: &ReservationProblem,
    t: usize,
    config: &SolutionConfig,
    replications: usize,
    seed: u64,
) -> Result<ExpectedTable> {
    problem.check_period(t)?;
    if !config.is_random() {
        let table = config.table_at(problem, t, seed)?;
        return estimate_mean(replications.min(1).max(1), seed, |_| Ok(table.clone())).map(
            |mut e| {
                e.replications = replications;
                e
            },
        );
    }
    estimate_mean(replications, seed, |s| config.table_at(problem, t, s))
}

impl ExpectedTable {
    /// Largest `|mean - x| / se` over internal entries; entries with zero
    /// standard error count only when the mean differs from `x`.
    pub fn max_z_score(&self, fair: &FairShareTable) -> f64 {
        let mut worst = 0.0f64;
        for (i, row) in self.mean.iter().enumerate() {
            for (j, mean) in row.iter().enumerate() {
                let diff = crate::rational::to_f64(&(*mean - fair.entry(i, j))).abs();
                let se = self.se[i][j];
                let z = if se > 0.0 {
                    diff / se
                } else if (*mean - fair.entry(i, j)).is_zero() {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(z);
            }
        }
        worst
    }
}
