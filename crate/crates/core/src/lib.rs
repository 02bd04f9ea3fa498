//! Refinement type checking by scoped elimination of Horn-constraint
//! variables.
//!
//! The pipeline: [`lang`] parses and elaborates a program, [`congen`] turns
//! it into an NNF Horn [`constraint`], [`fusion`] eliminates every acyclic
//! refinement variable by its strongest scoped solution, and [`fixpoint`]
//! solves whatever cut variables remain by predicate abstraction. Validity
//! queries go through a [`oracle::ValidityOracle`] supplied by the caller.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod congen;
pub mod constraint;
pub mod fixpoint;
pub mod fusion;
pub mod lang;
pub mod logic;
pub mod name;
pub mod oracle;
pub mod span;
#[cfg(feature = "testing")]
pub mod testing;

pub use name::{Name, NameGen};
pub use span::Span;
