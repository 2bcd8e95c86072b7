use std::fmt;

use crate::error::{Error, Result};
use crate::model::table::{FairShareTable, ReservationTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolutionKind {
    /// University-level roster over pooled vacancies.
    Government,
    /// Every department runs its own copy of one roster.
    Court,
    /// Independent random roster per department.
    Proposed,
}

impl SolutionKind {
    pub fn label(self) -> &'static str {
        match self {
            SolutionKind::Government => "government",
            SolutionKind::Court => "court",
            SolutionKind::Proposed => "proposed",
        }
    }
}

impl fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Fair share and reservation tables for periods `1..=T` of one solution run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionTrace {
    kind: SolutionKind,
    seed: Option<u64>,
    periods: Vec<(FairShareTable, ReservationTable)>,
}

impl SolutionTrace {
    pub fn new(
        kind: SolutionKind,
        seed: Option<u64>,
        periods: Vec<(FairShareTable, ReservationTable)>,
    ) -> Result<Self> {
        if periods.is_empty() {
            return Err(Error::Contract("a trace needs at least one period".into()));
        }
        for (s, (fair, res)) in periods.iter().enumerate() {
            res.check_matches(fair)?;
            if fair.period() != s + 1 {
                return Err(Error::Contract(format!(
                    "trace entry {} is labelled period {}",
                    s + 1,
                    fair.period()
                )));
            }
        }
        Ok(Self {
            kind,
            seed,
            periods,
        })
    }

    pub fn kind(&self) -> SolutionKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn periods(&self) -> &[(FairShareTable, ReservationTable)] {
        &self.periods
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    /// Tables of period `t` (1-based).
    pub fn period(&self, t: usize) -> Option<&(FairShareTable, ReservationTable)> {
        t.checked_sub(1).and_then(|s| self.periods.get(s))
    }

    pub fn last(&self) -> &(FairShareTable, ReservationTable) {
        self.periods.last().expect("traces are never empty")
    }

    /// Reservations never decrease from one period to the next.
    pub fn is_monotone(&self) -> bool {
        self.periods
            .windows(2)
            .all(|w| w[1].1.dominates(&w[0].1))
    }
}
