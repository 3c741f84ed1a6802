//! Outcome of an exact identity check.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tensor::{Entry, LegMatrix};

/// Result of comparing two sides of an identity in the truncated ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    /// Every grade up to the truncation order vanishes.
    ExactZero,
    /// The residual is nonzero; the payload is its lowest nonzero grade.
    FailsAtGrade(usize),
}

impl Status {
    pub fn from_valuation(v: Option<usize>) -> Self {
        match v {
            None => Status::ExactZero,
            Some(m) => Status::FailsAtGrade(m),
        }
    }

    pub fn of<T: Entry>(residual: &LegMatrix<T>) -> Self {
        Self::from_valuation(residual.valuation())
    }

    pub fn of_vector<T: Entry>(residual: &[T]) -> Self {
        Self::from_valuation(residual.iter().filter_map(Entry::valuation).min())
    }

    /// Residual of `a - b`, or a grade-0 failure if the shapes differ.
    pub fn of_difference<T: Entry>(a: &LegMatrix<T>, b: &LegMatrix<T>) -> Self {
        match a.sub(b) {
            Ok(r) => Self::of(&r),
            Err(_) => Status::FailsAtGrade(0),
        }
    }

    pub fn is_zero(self) -> bool {
        self == Status::ExactZero
    }

    pub fn grade(self) -> Option<usize> {
        match self {
            Status::ExactZero => None,
            Status::FailsAtGrade(m) => Some(m),
        }
    }

    /// The worse of two outcomes (lowest failing grade wins).
    pub fn combine(self, o: Status) -> Status {
        match (self.grade(), o.grade()) {
            (None, _) => o,
            (_, None) => self,
            (Some(a), Some(b)) => Status::FailsAtGrade(a.min(b)),
        }
    }

    pub fn all(it: impl IntoIterator<Item = Status>) -> Status {
        it.into_iter().fold(Status::ExactZero, Status::combine)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::ExactZero => write!(f, "exact-zero"),
            Status::FailsAtGrade(m) => write!(f, "fails-at-grade-{m}"),
        }
    }
}
