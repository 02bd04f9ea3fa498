use core::fmt;

use crate::name::Name;

/// Sorts of the refinement logic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Int,
    Bool,
    Unit,
    /// An uninterpreted sort (declared type constructor or type variable).
    Uninterp(Name),
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => f.write_str("Int"),
            Sort::Bool => f.write_str("Bool"),
            Sort::Unit => f.write_str("Unit"),
            Sort::Uninterp(n) => write!(f, "{n}"),
        }
    }
}
