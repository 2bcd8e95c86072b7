use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::scheme::ReservationScheme;

/// A multi-period reservation problem: departments, categories, scheme and
/// per-period vacancy vectors. Cumulative vacancies are derived on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReservationProblem {
    departments: Vec<String>,
    scheme: ReservationScheme,
    /// `vacancies[s][i]` is the number of new seats in department `i` during period `s + 1`.
    vacancies: Vec<Vec<u64>>,
}

impl ReservationProblem {
    pub fn new<S: Into<String>>(
        departments: impl IntoIterator<Item = S>,
        scheme: ReservationScheme,
        vacancies: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let departments: Vec<String> = departments.into_iter().map(Into::into).collect();
        if departments.is_empty() {
            return Err(Error::InvalidProblem("no departments".into()));
        }
        let mut seen = HashSet::new();
        for d in &departments {
            if d.is_empty() {
                return Err(Error::InvalidProblem("empty department name".into()));
            }
            if !seen.insert(d.as_str()) {
                return Err(Error::InvalidProblem(format!("duplicate department {d:?}")));
            }
        }
        if vacancies.is_empty() {
            return Err(Error::InvalidProblem("at least one period is required".into()));
        }
        for (s, q) in vacancies.iter().enumerate() {
            if q.len() != departments.len() {
                return Err(Error::InvalidProblem(format!(
                    "period {} lists {} vacancy counts for {} departments",
                    s + 1,
                    q.len(),
                    departments.len()
                )));
            }
        }
        Ok(Self {
            departments,
            scheme,
            vacancies,
        })
    }

    pub fn departments(&self) -> &[String] {
        &self.departments
    }

    pub fn department_count(&self) -> usize {
        self.departments.len()
    }

    pub fn category_count(&self) -> usize {
        self.scheme.len()
    }

    pub fn scheme(&self) -> &ReservationScheme {
        &self.scheme
    }

    pub fn periods(&self) -> usize {
        self.vacancies.len()
    }

    /// Vacancies that arise in period `t` (1-based).
    pub fn vacancies(&self, t: usize) -> Result<&[u64]> {
        self.check_period(t)?;
        Ok(&self.vacancies[t - 1])
    }

    pub fn all_vacancies(&self) -> &[Vec<u64>] {
        &self.vacancies
    }

    /// Cumulative vacancies `Q_i^t` for every department.
    pub fn cumulative(&self, t: usize) -> Result<Vec<u64>> {
        self.check_period(t)?;
        let mut acc = vec![0u64; self.departments.len()];
        for q in &self.vacancies[..t] {
            for (a, v) in acc.iter_mut().zip(q) {
                *a += v;
            }
        }
        Ok(acc)
    }

    /// Cumulative vacancies over the whole horizon.
    pub fn total_vacancies(&self) -> Vec<u64> {
        self.cumulative(self.periods())
            .expect("horizon period is always in range")
    }

    pub fn check_period(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.vacancies.len() {
            return Err(Error::PeriodOutOfRange {
                period: t,
                periods: self.vacancies.len(),
            });
        }
        Ok(())
    }
}
