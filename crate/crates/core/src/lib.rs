//! Dense linear-algebra laboratory for variable-time quantum search.
//!
//! The crate builds, at desk scale, the objects that appear in the analysis of
//! variable-time search: Grover iterates with per-call query weights,
//! variable-time subroutines with halting partitions, the two-reflection
//! phase-estimation instances obtained by loop composition, their witnesses,
//! and the family of cost radicals those constructions imply.
//!
//! Everything is exact dense arithmetic in `f64`; there is no sampling.

pub mod bounds;
pub mod error;
pub mod grover;
pub mod linalg;
pub mod loops;
pub mod phase;
pub mod textfmt;
pub mod vts;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, TolerancePolicy, C64};
