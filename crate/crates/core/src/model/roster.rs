//! Rosters: ordered assignments of seat positions to categories.
//!
//! Text form is one `index,category` line per position (1-based) after an
//! `index,category` header.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::scheme::ReservationScheme;
use crate::rational::{floor_int, int};

/// How positions past the materialized prefix are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ExtensionPolicy {
    /// Every block is an independent draw; the roster ends at its materialized length.
    #[default]
    IndependentBlocks,
    /// The first block repeats forever.
    RepeatBlock,
}

impl ExtensionPolicy {
    pub fn label(self) -> &'static str {
        match self {
            ExtensionPolicy::IndependentBlocks => "independent-blocks",
            ExtensionPolicy::RepeatBlock => "repeat-block",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roster {
    categories: Vec<String>,
    assignment: Vec<usize>,
    block_length: usize,
    policy: ExtensionPolicy,
}

impl Roster {
    /// `assignment[p]` is the index into `categories` for position `p + 1`.
    pub fn new(
        categories: Vec<String>,
        assignment: Vec<usize>,
        block_length: usize,
        policy: ExtensionPolicy,
    ) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidRoster("roster has no positions".into()));
        }
        if block_length == 0 || block_length > assignment.len() {
            return Err(Error::InvalidRoster(format!(
                "block length {block_length} outside 1..={}",
                assignment.len()
            )));
        }
        if let Some(bad) = assignment.iter().find(|&&c| c >= categories.len()) {
            return Err(Error::InvalidRoster(format!(
                "category index {bad} out of range for {} categories",
                categories.len()
            )));
        }
        if policy == ExtensionPolicy::RepeatBlock
            && (0..assignment.len()).any(|p| assignment[p] != assignment[p % block_length])
        {
            return Err(Error::InvalidRoster(
                "repeat-block roster does not repeat its first block".into(),
            ));
        }
        Ok(Self {
            categories,
            assignment,
            block_length,
            policy,
        })
    }

    /// A finite roster that is reused cyclically once exhausted.
    pub fn cyclic(categories: Vec<String>, assignment: Vec<usize>) -> Result<Self> {
        let len = assignment.len();
        Self::new(categories, assignment, len, ExtensionPolicy::RepeatBlock)
    }

    /// Deterministic roster in the style of published government rosters:
    /// position `q` goes to the first category whose `floor(q * alpha_j)`
    /// exceeds its count so far, otherwise to the last category.
    pub fn floor_rule(scheme: &ReservationScheme, length: usize) -> Result<Self> {
        let n = scheme.len();
        let mut counts = vec![0i64; n];
        let mut assignment = Vec::with_capacity(length);
        for q in 1..=length as i64 {
            let due = (0..n).find(|&j| floor_int(&(scheme.fraction(j) * int(q))) > counts[j]);
            let j = due.unwrap_or(n - 1);
            counts[j] += 1;
            assignment.push(j);
        }
        Self::cyclic(scheme.categories().to_vec(), assignment)
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    /// Materialized positions.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn policy(&self) -> ExtensionPolicy {
        self.policy
    }

    /// Whether positions past the materialized length exist.
    pub fn is_unbounded(&self) -> bool {
        self.policy == ExtensionPolicy::RepeatBlock
    }

    /// Category index at 1-based `position`, extending a repeat-block roster as needed.
    pub fn index_at(&self, position: usize) -> Option<usize> {
        if position == 0 {
            return None;
        }
        let p = position - 1;
        match self.assignment.get(p) {
            Some(&c) => Some(c),
            None if self.is_unbounded() => Some(self.assignment[p % self.block_length]),
            None => None,
        }
    }

    pub fn category_at(&self, position: usize) -> Option<&str> {
        self.index_at(position).map(|c| self.categories[c].as_str())
    }

    /// Per-category counts over the first `q` materialized positions.
    pub fn prefix_counts(&self, q: usize) -> Vec<u64> {
        let mut counts = vec![0u64; self.categories.len()];
        for &c in &self.assignment[..q.min(self.assignment.len())] {
            counts[c] += 1;
        }
        counts
    }

    /// For each roster category, the index of the same name in `scheme`.
    pub fn category_map(&self, scheme: &ReservationScheme) -> Result<Vec<usize>> {
        self.categories
            .iter()
            .map(|c| {
                scheme
                    .index_of(c)
                    .ok_or_else(|| Error::UnknownCategory(c.clone()))
            })
            .collect()
    }

    /// Serializes the materialized positions in `index,category` form.
    pub fn to_lines(&self) -> String {
        let mut out = String::from("index,category\n");
        for (p, &c) in self.assignment.iter().enumerate() {
            let _ = writeln!(out, "{},{}", p + 1, self.categories[c]);
        }
        out
    }

    /// Parses `index,category` lines. Categories are indexed by first
    /// appearance; indices must run 1, 2, 3, ... The result is cyclic.
    pub fn parse_lines(text: &str) -> Result<Self> {
        let mut categories: Vec<String> = Vec::new();
        let mut assignment = Vec::new();
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, header)) if header.trim().eq_ignore_ascii_case("index,category") => {}
            Some((n, _)) => {
                return Err(Error::InvalidRoster(format!(
                    "line {}: expected header `index,category`",
                    n + 1
                )))
            }
            None => return Err(Error::InvalidRoster("empty roster file".into())),
        }
        for (n, line) in lines {
            let (idx, cat) = line.split_once(',').ok_or_else(|| {
                Error::InvalidRoster(format!("line {}: expected `index,category`", n + 1))
            })?;
            let idx: usize = idx.trim().parse().map_err(|_| {
                Error::InvalidRoster(format!("line {}: bad position {:?}", n + 1, idx.trim()))
            })?;
            if idx != assignment.len() + 1 {
                return Err(Error::InvalidRoster(format!(
                    "line {}: position {idx} out of sequence, expected {}",
                    n + 1,
                    assignment.len() + 1
                )));
            }
            let cat = cat.trim();
            if cat.is_empty() {
                return Err(Error::InvalidRoster(format!("line {}: empty category", n + 1)));
            }
            let c = match categories.iter().position(|x| x == cat) {
                Some(c) => c,
                None => {
                    categories.push(cat.to_string());
                    categories.len() - 1
                }
            };
            assignment.push(c);
        }
        Self::cyclic(categories, assignment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn thirds() -> ReservationScheme {
        ReservationScheme::new(["c1", "c2"], [ratio(1, 3), ratio(2, 3)]).unwrap()
    }

    #[test]
    fn floor_rule_reproduces_the_mod_three_roster() {
        let r = Roster::floor_rule(&thirds(), 3).unwrap();
        let names: Vec<_> = (1..=9).map(|p| r.category_at(p).unwrap()).collect();
        assert_eq!(names, ["c2", "c2", "c1", "c2", "c2", "c1", "c2", "c2", "c1"]);
    }

    #[test]
    fn independent_roster_ends_at_its_length() {
        let r = Roster::new(
            vec!["a".into(), "b".into()],
            vec![0, 1, 1, 0],
            2,
            ExtensionPolicy::IndependentBlocks,
        )
        .unwrap();
        assert_eq!(r.index_at(4), Some(0));
        assert_eq!(r.index_at(5), None);
        assert_eq!(r.index_at(0), None);
    }

    #[test]
    fn repeat_block_must_actually_repeat() {
        let err = Roster::new(
            vec!["a".into(), "b".into()],
            vec![0, 1, 1, 0],
            2,
            ExtensionPolicy::RepeatBlock,
        );
        assert!(err.is_err());
    }

    #[test]
    fn line_format_round_trips() {
        let r = Roster::floor_rule(&thirds(), 6).unwrap();
        let text = r.to_lines();
        assert!(text.starts_with("index,category\n1,c2\n2,c2\n3,c1\n"));
        let back = Roster::parse_lines(&text).unwrap();
        let names: Vec<_> = (1..=6).map(|p| back.category_at(p).unwrap()).collect();
        assert_eq!(names, ["c2", "c2", "c1", "c2", "c2", "c1"]);
    }

    #[test]
    fn parse_rejects_gaps_and_missing_header() {
        assert!(Roster::parse_lines("1,c1\n").is_err());
        assert!(Roster::parse_lines("index,category\n1,c1\n3,c2\n").is_err());
        assert!(Roster::parse_lines("index,category\n").is_err());
    }
}
