//! The interface to whatever decides validity of κ-free clauses.

use alloc::string::String;
use alloc::vec::Vec;

use crate::constraint::FlatClause;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// Invalid, with a countermodel when the backend provides one.
    Invalid(Option<String>),
    /// Timeout, backend failure or an unsupported formula.
    Unknown(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Decides validity of closed flat clauses. Free variables of a clause that
/// are not bound by its binders are treated as universally quantified
/// constants of the sort the oracle was configured with.
pub trait ValidityOracle {
    fn check(&mut self, clause: &FlatClause) -> Verdict;

    /// Verdicts in input order. Implementations may check concurrently.
    fn check_all(&mut self, clauses: &[FlatClause]) -> Vec<Verdict> {
        clauses.iter().map(|c| self.check(c)).collect()
    }
}

impl<O: ValidityOracle + ?Sized> ValidityOracle for &mut O {
    fn check(&mut self, clause: &FlatClause) -> Verdict {
        (**self).check(clause)
    }

    fn check_all(&mut self, clauses: &[FlatClause]) -> Vec<Verdict> {
        (**self).check_all(clauses)
    }
}
