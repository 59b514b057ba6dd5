use std::fmt;
use std::time::Duration;

use crate::arith::{Rational, Residue};

/// What was observed at a failing index: a nonzero residue for congruence
/// scans, or the nonzero defect of an identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observed {
    Residue(Residue),
    Value(Rational),
}

impl fmt::Display for Observed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observed::Residue(r) => write!(f, "{r}"),
            Observed::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub index: usize,
    pub observed: Observed,
}

/// Outcome of an exact check over a range of indices.
///
/// An empty `counterexamples` list means every index in `range` passed.
/// Counterexamples are sorted by index.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub description: String,
    /// Inclusive range of the scanned parameter (`m` for congruence scans, `n` otherwise).
    pub range: (usize, usize),
    pub counterexamples: Vec<Counterexample>,
    pub elapsed: Duration,
    pub engine: String,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub(crate) fn sort(&mut self) {
        self.counterexamples.sort_by_key(|c| c.index);
    }
}
