//! JSON report structures. Rationals are written as exact strings (`"4/3"`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use reserve_core::analysis::{violation_stats_at, BoxSummary, PeriodBias, Scope, ViolationStats};
use reserve_core::rational::{parse_rational, Exact};
use reserve_core::{FairShareTable, Rational, ReservationProblem, ReservationTable};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub solution: String,
    pub seed: Option<u64>,
    pub rng: String,
    pub config: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow<T> {
    pub department: String,
    pub values: Vec<T>,
    pub total: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableJson<T> {
    pub period: usize,
    pub categories: Vec<String>,
    pub rows: Vec<TableRow<T>>,
    pub column_totals: Vec<T>,
    pub grand_total: T,
}

fn exact(x: &Rational) -> String {
    Exact(x).to_string()
}

impl TableJson<u64> {
    pub fn from_reservation(problem: &ReservationProblem, t: &ReservationTable) -> Self {
        Self {
            period: t.period(),
            categories: problem.scheme().categories().to_vec(),
            rows: problem
                .departments()
                .iter()
                .zip(t.internal())
                .zip(t.row_totals())
                .map(|((d, r), total)| TableRow {
                    department: d.clone(),
                    values: r.clone(),
                    total: *total,
                })
                .collect(),
            column_totals: t.column_totals().to_vec(),
            grand_total: t.grand_total(),
        }
    }

    /// Rebuilds the table, checking additivity.
    pub fn to_reservation(&self) -> CliResult<ReservationTable> {
        Ok(ReservationTable::new(
            self.period,
            self.rows.iter().map(|r| r.values.clone()).collect(),
            self.rows.iter().map(|r| r.total).collect(),
            self.column_totals.clone(),
            self.grand_total,
        )?)
    }
}

impl TableJson<String> {
    pub fn from_fair(problem: &ReservationProblem, t: &FairShareTable) -> Self {
        Self {
            period: t.period(),
            categories: problem.scheme().categories().to_vec(),
            rows: problem
                .departments()
                .iter()
                .zip(t.internal())
                .zip(t.row_totals())
                .map(|((d, r), total)| TableRow {
                    department: d.clone(),
                    values: r.iter().map(exact).collect(),
                    total: exact(total),
                })
                .collect(),
            column_totals: t.column_totals().iter().map(exact).collect(),
            grand_total: exact(&t.grand_total()),
        }
    }

    /// Rebuilds the table, checking additivity.
    pub fn to_fair(&self) -> CliResult<FairShareTable> {
        let parse = |s: &String| parse_rational(s).map_err(|e| CliError::Parse(e.to_string()));
        let internal = self
            .rows
            .iter()
            .map(|r| r.values.iter().map(parse).collect::<CliResult<Vec<_>>>())
            .collect::<CliResult<Vec<_>>>()?;
        Ok(FairShareTable::new(
            self.period,
            internal,
            self.rows.iter().map(|r| parse(&r.total)).collect::<CliResult<_>>()?,
            self.column_totals.iter().map(parse).collect::<CliResult<_>>()?,
            parse(&self.grand_total)?,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeJson {
    pub avg: String,
    pub min: String,
    pub max: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationJson {
    pub scope: String,
    pub instances: usize,
    pub max_possible: usize,
    pub percentage: f64,
    pub magnitude: Option<MagnitudeJson>,
}

impl From<&ViolationStats> for ViolationJson {
    fn from(v: &ViolationStats) -> Self {
        Self {
            scope: v.scope.label().into(),
            instances: v.instances,
            max_possible: v.max_possible,
            percentage: v.percentage(),
            magnitude: v.avg_magnitude().map(|avg| MagnitudeJson {
                avg: exact(&avg),
                min: exact(&v.min_magnitude().expect("non-empty")),
                max: exact(&v.max_magnitude().expect("non-empty")),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxJson {
    pub count: usize,
    pub min: f64,
    pub lower_adjacent: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub upper_adjacent: f64,
    pub max: f64,
}

impl From<&BoxSummary> for BoxJson {
    fn from(b: &BoxSummary) -> Self {
        Self {
            count: b.count,
            min: b.min,
            lower_adjacent: b.lower_adjacent,
            q1: b.q1,
            median: b.median,
            q3: b.q3,
            upper_adjacent: b.upper_adjacent,
            max: b.max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasJson {
    pub department: BoxJson,
    pub university: BoxJson,
    pub max_abs_department: String,
    pub max_abs_university: String,
}

impl From<&PeriodBias> for BiasJson {
    fn from(b: &PeriodBias) -> Self {
        Self {
            department: (&b.department).into(),
            university: (&b.university).into(),
            max_abs_department: exact(&b.max_abs_department),
            max_abs_university: exact(&b.max_abs_university),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub period: usize,
    pub fair_share: TableJson<String>,
    pub reservation: TableJson<u64>,
    pub violations: Vec<ViolationJson>,
    pub bias: Option<BiasJson>,
}

impl PeriodReport {
    pub fn new(
        problem: &ReservationProblem,
        fair: &FairShareTable,
        res: &ReservationTable,
        bias: Option<&PeriodBias>,
    ) -> CliResult<Self> {
        let violations = [Scope::Department, Scope::University]
            .into_iter()
            .map(|s| violation_stats_at(fair, res, s).map(|v| ViolationJson::from(&v)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            period: fair.period(),
            fair_share: TableJson::from_fair(problem, fair),
            reservation: TableJson::from_reservation(problem, res),
            violations,
            bias: bias.map(BiasJson::from),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub metadata: Metadata,
    pub periods: Vec<PeriodReport>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("report: {e}")))
    }

    /// Re-parses every table pair and checks that reservation row totals
    /// match the fair share row totals.
    pub fn tables(&self) -> CliResult<Vec<(FairShareTable, ReservationTable)>> {
        self.periods
            .iter()
            .map(|p| {
                let fair = p.fair_share.to_fair()?;
                let res = p.reservation.to_reservation()?;
                res.check_matches(&fair)?;
                Ok((fair, res))
            })
            .collect()
    }
}

/// One line of the long-format comparison output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub solution: String,
    pub period: usize,
    pub scope: String,
    pub statistic: String,
    pub value: f64,
}
