//! Violation statistics, bias distributions, tail diagnostics for the
//! university totals of the proposed solution, and the adaptive sequence on
//! which every university-quota policy accumulates department bias.

use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::quota::{bias_of, within_department_quota, within_university_quota};
use crate::model::table::{FairShareTable, ReservationTable};
use crate::model::trace::SolutionTrace;
use crate::model::{ReservationProblem, ReservationScheme};
use crate::rational::{int, ratio, to_f64, Rational};
use crate::rng::replication_seeds;
use crate::solutions::proposed_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    /// Internal cells.
    Department,
    /// Column totals.
    University,
}

impl Scope {
    pub fn label(self) -> &'static str {
        match self {
            Scope::Department => "department",
            Scope::University => "university",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Quota violations of one reservation table. `max_possible` is `m * n` at
/// department scope and `n` at university scope.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationStats {
    pub scope: Scope,
    pub period: usize,
    pub instances: usize,
    pub max_possible: usize,
    /// `|bias|` of each violating entry.
    pub magnitudes: Vec<Rational>,
}

impl ViolationStats {
    /// `instances / max_possible`, in `[0, 1]`.
    pub fn percentage(&self) -> f64 {
        if self.max_possible == 0 {
            0.0
        } else {
            self.instances as f64 / self.max_possible as f64
        }
    }

    pub fn min_magnitude(&self) -> Option<Rational> {
        self.magnitudes.iter().min().copied()
    }

    pub fn max_magnitude(&self) -> Option<Rational> {
        self.magnitudes.iter().max().copied()
    }

    pub fn avg_magnitude(&self) -> Option<Rational> {
        if self.magnitudes.is_empty() {
            return None;
        }
        let sum: Rational = self.magnitudes.iter().sum();
        Some(sum / int(self.magnitudes.len() as i64))
    }
}

/// Violations of `res` against `fair` at `scope`.
pub fn violation_stats_at(
    fair: &FairShareTable,
    res: &ReservationTable,
    scope: Scope,
) -> Result<ViolationStats> {
    let bias = bias_of(res, fair)?;
    let magnitudes: Vec<Rational> = match scope {
        Scope::Department => within_department_quota(res, fair)?
            .iter()
            .map(|v| bias.entry(v.department, v.category).abs())
            .collect(),
        Scope::University => within_university_quota(res, fair)?
            .iter()
            .map(|v| bias.column_totals()[v.category].abs())
            .collect(),
    };
    Ok(ViolationStats {
        scope,
        period: fair.period(),
        instances: magnitudes.len(),
        max_possible: match scope {
            Scope::Department => fair.rows() * fair.cols(),
            Scope::University => fair.cols(),
        },
        magnitudes,
    })
}

/// Violations in the final period of `trace`.
pub fn violation_stats(trace: &SolutionTrace, scope: Scope) -> ViolationStats {
    let (fair, res) = trace.last();
    violation_stats_at(fair, res, scope).expect("trace tables always match")
}

/// Median, quartiles (linear interpolation) and Tukey adjacent values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSummary {
    pub count: usize,
    pub min: f64,
    pub lower_adjacent: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub upper_adjacent: f64,
    pub max: f64,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl BoxSummary {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q1 = quantile(&sorted, 0.25);
        let q3 = quantile(&sorted, 0.75);
        let fence = 1.5 * (q3 - q1);
        let lower_adjacent = *sorted.iter().find(|&&v| v >= q1 - fence).expect("q1 is in range");
        let upper_adjacent = *sorted
            .iter()
            .rev()
            .find(|&&v| v <= q3 + fence)
            .expect("q3 is in range");
        Some(Self {
            count: sorted.len(),
            min: sorted[0],
            lower_adjacent,
            q1,
            median: quantile(&sorted, 0.5),
            q3,
            upper_adjacent,
            max: sorted[sorted.len() - 1],
        })
    }

    /// Named statistics in a fixed order, for long-format output.
    pub fn statistics(&self) -> [(&'static str, f64); 8] {
        [
            ("count", self.count as f64),
            ("min", self.min),
            ("lower_adjacent", self.lower_adjacent),
            ("q1", self.q1),
            ("median", self.median),
            ("q3", self.q3),
            ("upper_adjacent", self.upper_adjacent),
            ("max", self.max),
        ]
    }
}

/// Bias distribution of one period: internal cells (department panel) and
/// column totals (university panel).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodBias {
    pub period: usize,
    pub department: BoxSummary,
    pub university: BoxSummary,
    pub max_abs_department: Rational,
    pub max_abs_university: Rational,
}

#[derive(Debug, Default)]
struct BiasPool {
    department: Vec<f64>,
    university: Vec<f64>,
    max_department: Rational,
    max_university: Rational,
}

impl BiasPool {
    fn add(&mut self, fair: &FairShareTable, res: &ReservationTable) {
        let bias = bias_of(res, fair).expect("trace tables always match");
        self.department.extend(bias.internal().iter().flatten().map(to_f64));
        self.university.extend(bias.column_totals().iter().map(to_f64));
        self.max_department = self.max_department.max(bias.max_abs_internal());
        self.max_university = self.max_university.max(bias.max_abs_column());
    }

    fn finish(self, period: usize) -> PeriodBias {
        PeriodBias {
            period,
            department: BoxSummary::of(&self.department).expect("tables are never empty"),
            university: BoxSummary::of(&self.university).expect("tables are never empty"),
            max_abs_department: self.max_department,
            max_abs_university: self.max_university,
        }
    }
}

/// Per-period bias summaries of one trace.
pub fn bias_trace(trace: &SolutionTrace) -> Vec<PeriodBias> {
    bias_trace_many(std::slice::from_ref(trace))
}

/// Per-period bias summaries pooled over several traces of equal length.
pub fn bias_trace_many(traces: &[SolutionTrace]) -> Vec<PeriodBias> {
    let periods = traces.iter().map(SolutionTrace::len).min().unwrap_or(0);
    (0..periods)
        .map(|s| {
            let mut pool = BiasPool::default();
            for trace in traces {
                let (fair, res) = &trace.periods()[s];
                pool.add(fair, res);
            }
            pool.finish(s + 1)
        })
        .collect()
}

/// Empirical tails of `z_j - x_j` for one university total of the proposed
/// solution against the exponential bounds `exp(-b^2 / 3x)` (upper) and
/// `exp(-b^2 / 2x)` (lower).
#[derive(Debug, Clone, PartialEq)]
pub struct TailDiagnostic {
    pub category: usize,
    pub period: usize,
    pub fair_share: Rational,
    pub replications: usize,
    /// `(z, count)` for every observed column total, ascending in `z`.
    pub histogram: Vec<(u64, u64)>,
    pub grid: Vec<f64>,
    pub upper_frequency: Vec<f64>,
    pub lower_frequency: Vec<f64>,
    pub upper_se: Vec<f64>,
    pub lower_se: Vec<f64>,
    pub upper_bound: Vec<f64>,
    pub lower_bound: Vec<f64>,
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

impl TailDiagnostic {
    /// Empirical mean of `z - x`.
    pub fn mean_deviation(&self) -> f64 {
        let x = to_f64(&self.fair_share);
        self.histogram
            .iter()
            .map(|&(z, c)| (z as f64 - x) * c as f64)
            .sum::<f64>()
            / self.replications as f64
    }

    /// Every frequency is at most its bound plus `k` standard errors.
    pub fn within_bounds(&self, k: f64) -> bool {
        (0..self.grid.len()).all(|g| {
            self.upper_frequency[g] <= self.upper_bound[g] + k * self.upper_se[g]
                && self.lower_frequency[g] <= self.lower_bound[g] + k * self.lower_se[g]
        })
    }

    /// Whether each frequency's standard error, evaluated at the bound of
    /// the largest `b`, is below a quarter of that bound.
    pub fn is_adequate(&self) -> bool {
        let Some(last) = self.grid.len().checked_sub(1) else {
            return true;
        };
        [self.upper_bound[last], self.lower_bound[last]]
            .iter()
            .all(|&bound| binomial_se(bound, self.replications) < bound / 4.0)
    }

    /// `-ln(freq) * x / b^2` per grid point: the exponent constant the
    /// empirical upper tail implies. `None` where the frequency is zero or
    /// `b` is zero.
    pub fn implied_upper_exponent(&self) -> Vec<Option<f64>> {
        let x = to_f64(&self.fair_share);
        self.grid
            .iter()
            .zip(&self.upper_frequency)
            .map(|(&b, &f)| (f > 0.0 && b > 0.0).then(|| -f.ln() * x / (b * b)))
            .collect()
    }
}

/// Runs the proposed solution `replications` times and tabulates the
/// deviation of column total `category` at period `t` from its fair share.
pub fn tail_diagnostic(
    problem: &ReservationProblem,
    category: usize,
    t: usize,
    replications: usize,
    grid: &[f64],
    seed: u64,
) -> Result<TailDiagnostic> {
    let fair = FairShareTable::for_period(problem, t)?;
    if category >= problem.category_count() {
        return Err(Error::Shape(format!(
            "category {category} out of range for {} categories",
            problem.category_count()
        )));
    }
    if replications == 0 {
        return Err(Error::Contract("at least one replication is required".into()));
    }
    let seeds = replication_seeds(seed, replications);
    let mut totals = seeds
        .par_iter()
        .map(|&s| Ok(proposed_table(problem, t, s)?.column_totals()[category]))
        .collect::<Result<Vec<u64>>>()?;
    totals.sort_unstable();
    let mut histogram: Vec<(u64, u64)> = Vec::new();
    for z in totals {
        match histogram.last_mut() {
            Some((last, c)) if *last == z => *c += 1,
            _ => histogram.push((z, 1)),
        }
    }
    let x = fair.column_totals()[category];
    let xf = to_f64(&x);
    let n = replications as f64;
    let tail = |pred: &dyn Fn(f64) -> bool| {
        histogram
            .iter()
            .filter(|&&(z, _)| pred(z as f64 - xf))
            .map(|&(_, c)| c)
            .sum::<u64>() as f64
            / n
    };
    let upper_frequency: Vec<f64> = grid.iter().map(|&b| tail(&|d| d >= b)).collect();
    let lower_frequency: Vec<f64> = grid.iter().map(|&b| tail(&|d| d <= -b)).collect();
    Ok(TailDiagnostic {
        category,
        period: t,
        fair_share: x,
        replications,
        upper_se: upper_frequency.iter().map(|&p| binomial_se(p, replications)).collect(),
        lower_se: lower_frequency.iter().map(|&p| binomial_se(p, replications)).collect(),
        upper_bound: grid.iter().map(|&b| (-b * b / (3.0 * xf)).exp()).collect(),
        lower_bound: grid.iter().map(|&b| (-b * b / (2.0 * xf)).exp()).collect(),
        histogram,
        grid: grid.to_vec(),
        upper_frequency,
        lower_frequency,
    })
}

/// Departments of the adversarial sequence.
pub const ADVERSARIAL_DEPARTMENTS: [&str; 3] = ["d1", "d2", "d3"];

/// What a policy sees before placing the single vacancy of a period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversarialStep<'a> {
    pub period: usize,
    /// Department receiving the vacancy (0-based).
    pub department: usize,
    /// Cumulative reservations up to the previous period.
    pub reserved: &'a [Vec<u64>],
}

/// A realized adversarial sequence and the policy's reservations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversarialRun {
    pub problem: ReservationProblem,
    /// Category chosen in each period.
    pub choices: Vec<usize>,
    pub tables: Vec<(FairShareTable, ReservationTable)>,
}

impl AdversarialRun {
    /// Largest `|bias|` over internal cells, per period.
    pub fn max_department_bias(&self) -> Vec<Rational> {
        self.tables
            .iter()
            .map(|(fair, res)| bias_of(res, fair).expect("tables match").max_abs_internal())
            .collect()
    }
}

fn halves() -> ReservationScheme {
    ReservationScheme::new(["c1", "c2"], [ratio(1, 2), ratio(1, 2)])
        .expect("the two-halves scheme is valid")
}

/// Builds the adaptive three-department sequence against `policy`.
///
/// Every period brings one vacancy under `alpha = (1/2, 1/2)`. Odd periods
/// give it to `d3`. An even period gives it to `d1` when `d3` took `c1` in the
/// period before and to `d2` otherwise. After each period the university
/// totals must be within quota; a policy that breaks this is a contract error.
pub fn adversarial_sequence<F>(periods: usize, policy: F) -> Result<AdversarialRun>
where
    F: FnMut(&AdversarialStep<'_>) -> usize,
{
    if periods < 2 {
        return Err(Error::Contract("the sequence needs at least two periods".into()));
    }
    play(periods, policy)
}

fn play<F>(periods: usize, mut policy: F) -> Result<AdversarialRun>
where
    F: FnMut(&AdversarialStep<'_>) -> usize,
{
    let scheme = halves();
    let mut reserved = vec![vec![0u64; 2]; 3];
    let mut vacancies = Vec::with_capacity(periods);
    let mut choices: Vec<usize> = Vec::with_capacity(periods);
    let mut tables = Vec::with_capacity(periods);
    for t in 1..=periods {
        let department = if t % 2 == 1 {
            2
        } else if choices[t - 2] == 0 {
            0
        } else {
            1
        };
        let choice = policy(&AdversarialStep {
            period: t,
            department,
            reserved: &reserved,
        });
        if choice >= 2 {
            return Err(Error::Contract(format!("period {t}: category {choice} out of range")));
        }
        reserved[department][choice] += 1;
        choices.push(choice);
        let mut q = vec![0u64; 3];
        q[department] = 1;
        vacancies.push(q);

        let problem =
            ReservationProblem::new(ADVERSARIAL_DEPARTMENTS, scheme.clone(), vacancies.clone())?;
        let fair = FairShareTable::for_period(&problem, t)?;
        let res = ReservationTable::from_internal(t, reserved.clone())?;
        if let Some(v) = within_university_quota(&res, &fair)?.first() {
            return Err(Error::Contract(format!(
                "period {t}: university total {} of category {} is not within quota",
                v.reserved,
                scheme.categories()[v.category]
            )));
        }
        tables.push((fair, res));
    }
    Ok(AdversarialRun {
        problem: ReservationProblem::new(ADVERSARIAL_DEPARTMENTS, scheme, vacancies)?,
        choices,
        tables,
    })
}

/// Every run whose choices keep the university totals within quota, found
/// by exhaustive search over the category of each vacancy. Sorted by choices.
pub fn enumerate_compliant_runs(periods: usize) -> Result<Vec<AdversarialRun>> {
    if periods < 2 {
        return Err(Error::Contract("the sequence needs at least two periods".into()));
    }
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(prefix) = frontier.pop() {
        for c in (0..2).rev() {
            let mut next = prefix.clone();
            next.push(c);
            let Ok(run) = play(next.len(), |s| next[s.period - 1]) else {
                continue;
            };
            if next.len() == periods {
                out.push(run);
            } else {
                frontier.push(next);
            }
        }
    }
    out.sort_by(|a, b| a.choices.cmp(&b.choices));
    Ok(out)
}

/// The compliant run with the largest final department bias; ties go to
/// the lexicographically smallest choice sequence.
pub fn worst_case_run(periods: usize) -> Result<AdversarialRun> {
    let runs = enumerate_compliant_runs(periods)?;
    let mut best: Option<(Rational, AdversarialRun)> = None;
    for run in runs {
        let last = *run.max_department_bias().last().expect("periods >= 2");
        if best.as_ref().map_or(true, |(b, _)| last > *b) {
            best = Some((last, run));
        }
    }
    best.map(|(_, r)| r)
        .ok_or_else(|| Error::Contract("no compliant policy exists".into()))
}

/// Whether `values` strictly increases.
pub fn strictly_increasing(values: &[Rational]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

/// Zero when every entry is zero.
pub fn is_zero_summary(b: &PeriodBias) -> bool {
    b.max_abs_department.is_zero() && b.max_abs_university.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Roster;
    use crate::solutions::{run_court, run_government, run_proposed, DepartmentOrder, RosterMode};

    fn four_departments() -> ReservationProblem {
        let scheme = ReservationScheme::new(["c1", "c2"], [ratio(1, 3), ratio(2, 3)]).unwrap();
        ReservationProblem::new(["d1", "d2", "d3", "d4"], scheme, vec![vec![2, 1, 2, 1]; 3]).unwrap()
    }

    #[test]
    fn government_violations_on_four_departments() {
        let p = four_departments();
        let r = Roster::floor_rule(p.scheme(), 3).unwrap();
        let g = run_government(&p, &r, DepartmentOrder::Input, RosterMode::Cycle).unwrap();
        let s = violation_stats(&g, Scope::Department);
        assert_eq!((s.instances, s.max_possible), (8, 8));
        assert_eq!(s.percentage(), 1.0);
        assert_eq!(s.avg_magnitude(), Some(int(2)));
        let u = violation_stats(&g, Scope::University);
        assert_eq!((u.instances, u.max_possible), (0, 2));

        let c = run_court(&p, &r, RosterMode::Cycle).unwrap();
        assert_eq!(violation_stats(&c, Scope::Department).instances, 0);
        assert_eq!(violation_stats(&c, Scope::University).instances, 0);
    }

    #[test]
    fn government_bias_grows_linearly() {
        let p = four_departments();
        let r = Roster::floor_rule(p.scheme(), 3).unwrap();
        let g = run_government(&p, &r, DepartmentOrder::Input, RosterMode::Cycle).unwrap();
        let maxes: Vec<Rational> = bias_trace(&g).iter().map(|b| b.max_abs_department).collect();
        assert_eq!(maxes, [ratio(2, 3), ratio(4, 3), int(2)]);
    }

    #[test]
    fn proposed_bias_inside_unit_interval() {
        let p = four_departments();
        let traces: Vec<_> = (0..50).map(|s| run_proposed(&p, s).unwrap()).collect();
        for b in bias_trace_many(&traces) {
            assert!(b.max_abs_department < int(1));
            assert!(b.department.min > -1.0 && b.department.max < 1.0);
        }
        for t in &traces {
            assert_eq!(violation_stats(t, Scope::Department).instances, 0);
        }
    }

    #[test]
    fn box_summary_uses_linear_quartiles_and_tukey_fences() {
        let s = BoxSummary::of(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (2.0, 3.0, 4.0));
        assert_eq!((s.lower_adjacent, s.upper_adjacent), (1.0, 4.0));
        assert_eq!(s.max, 100.0);
        assert!(BoxSummary::of(&[]).is_none());
        let one = BoxSummary::of(&[0.5]).unwrap();
        assert_eq!((one.q1, one.median, one.upper_adjacent), (0.5, 0.5, 0.5));
    }

    #[test]
    fn case_one_reproduces_the_period_three_table() {
        let run = adversarial_sequence(5, |s| if s.period % 2 == 1 { 0 } else { 1 }).unwrap();
        assert_eq!(run.tables[2].1.internal(), &[vec![0, 1], vec![0, 0], vec![2, 0]]);
        let (fair, res) = &run.tables[1];
        assert_eq!(bias_of(res, fair).unwrap().entry(0, 0), ratio(-1, 2));
    }

    #[test]
    fn noncompliant_policy_is_a_contract_error() {
        let err = adversarial_sequence(2, |_| 0).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        assert!(adversarial_sequence(1, |_| 0).is_err());
    }

    #[test]
    fn compliant_runs_are_exactly_the_free_odd_choices() {
        for periods in 2..=8 {
            let runs = enumerate_compliant_runs(periods).unwrap();
            assert_eq!(runs.len(), 1 << periods.div_ceil(2));
        }
    }

    #[test]
    fn every_compliant_run_accrues_bias() {
        for k in 1..=4usize {
            for run in enumerate_compliant_runs(2 * k).unwrap() {
                let maxes = run.max_department_bias();
                assert!(maxes[2 * k - 1] >= ratio(k as i64, 4));
                let evens: Vec<Rational> = maxes.iter().skip(1).step_by(2).copied().collect();
                assert!(evens.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn worst_case_reaches_two_in_eight_periods() {
        let run = worst_case_run(8).unwrap();
        let maxes = run.max_department_bias();
        assert_eq!(
            maxes,
            [ratio(1, 2), ratio(1, 2), int(1), int(1), ratio(3, 2), ratio(3, 2), int(2), int(2)]
        );
    }
}
