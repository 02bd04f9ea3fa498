//! The refinement logic: sorts, refinement variables, predicates, sort
//! checking and hypothesis skolemization.

mod kvar;
mod pred;
mod skolem;
mod sort;
mod sortck;

pub use kvar::KVar;
pub use pred::{ArithOp, Pred, PredKind, RelOp, Renaming};
pub use skolem::{skolemize_hypotheses, SkolemError};
pub use sort::Sort;
pub use sortck::{SortEnv, SortError};
