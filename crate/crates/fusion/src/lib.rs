//! Command-line driver, SMT backend and file formats for the Fusion
//! refinement checker.

pub mod diag;
pub mod driver;
pub mod format;
pub mod quals;
pub mod sexp;
pub mod smt;
