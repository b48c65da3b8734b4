//! Sortedness constraints over finite integer domains.
//!
//! The library decides whether the constraints `sort(U,V)`, `sort(U,V,P)` and
//! `keysorting(U,V,1,P)` admit a support, checks domain/bounds consistency at
//! the definition level, and builds gadget instances from NAE-3SAT formulas so
//! that the structural properties of the construction can be checked
//! mechanically.

pub mod consistency;
pub mod error;
pub mod instance;
pub mod intervals;
pub mod nae;
pub mod reduction;
pub mod solver;

pub use error::Error;
pub use instance::{IntersectionGraph, Matching, SortInstance, SupportWitness};
pub use intervals::IntegerSet;
pub use nae::{Assignment, CnfFormula};
pub use reduction::{ReductionTrace, Variant};
pub use solver::{Outcome, SolveOptions, Verdict};
