use std::collections::HashSet;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{Exact, Rational};

/// Fraction of seats reserved for each beneficiary category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReservationScheme {
    categories: Vec<String>,
    fractions: Vec<Rational>,
}

impl ReservationScheme {
    pub fn new<S: Into<String>>(
        categories: impl IntoIterator<Item = S>,
        fractions: impl IntoIterator<Item = Rational>,
    ) -> Result<Self> {
        let categories: Vec<String> = categories.into_iter().map(Into::into).collect();
        let fractions: Vec<Rational> = fractions.into_iter().collect();
        if categories.len() != fractions.len() {
            return Err(Error::InvalidScheme(format!(
                "{} categories but {} fractions",
                categories.len(),
                fractions.len()
            )));
        }
        if categories.len() < 2 {
            return Err(Error::InvalidScheme("at least two categories are required".into()));
        }
        let mut seen = HashSet::new();
        for name in &categories {
            if name.is_empty() {
                return Err(Error::InvalidScheme("empty category name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidScheme(format!("duplicate category {name:?}")));
            }
        }
        for (name, a) in categories.iter().zip(&fractions) {
            if *a <= Rational::zero() || *a >= Rational::one() {
                return Err(Error::InvalidScheme(format!(
                    "fraction for {name:?} is {}, expected a value strictly between 0 and 1",
                    Exact(a)
                )));
            }
        }
        let total: Rational = fractions.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidScheme(format!(
                "fractions sum to {}, expected exactly 1",
                Exact(&total)
            )));
        }
        Ok(Self {
            categories,
            fractions,
        })
    }

    /// Number of categories.
    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn fractions(&self) -> &[Rational] {
        &self.fractions
    }

    pub fn fraction(&self, j: usize) -> Rational {
        self.fractions[j]
    }

    pub fn index_of(&self, category: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == category)
    }

    /// Smallest block length `k` for which every `k * alpha_j` is an integer.
    pub fn minimal_block_length(&self) -> usize {
        self.fractions
            .iter()
            .fold(1i64, |acc, a| acc.lcm(a.denom())) as usize
    }
}
