//! Validity checking of κ-free clauses with an external SMT-LIB2 solver.

pub mod emit;
pub mod pool;
pub mod solver;

pub use emit::{clause_query, constraint_pred, emit_smtlib, validity_query, EmitError, Query};
pub use pool::SmtPool;
pub use solver::{Solver, SolverConfig, SolverError};
