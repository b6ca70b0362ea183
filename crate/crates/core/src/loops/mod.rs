//! Phase-estimation instances built from two families of generators.
//!
//! An instance is `(H, ψ₀, Ψ_A, Ψ_B)`: phase estimation of
//! `U_AB = (2Π_A − I)(2Π_B − I)` on `ψ₀` separates the case with a positive
//! witness (a vector orthogonal to both spans with nonzero overlap on `ψ₀`)
//! from the case with a negative witness (`ψ₀ = w_A + w_B`, `w_A ∈ span Ψ_A`,
//! `w_B ∈ span Ψ_B`).
//!
//! Two constructions are provided: the simple loop over an oracle with unit
//! query cost, and loop composition with a zero-error variable-time
//! subroutine, where history states of the subroutine stitch the forward and
//! backward tracks together.

mod general;
mod instance;
mod labels;
mod regime;
mod simple;
mod witness;

pub use general::{
    build_general_instance, general_negative_witness, general_positive_witness, general_witness, history_report, history_states,
    space_of, HistoryReport, HistoryTriple,
};
pub use instance::{GeneratorGroup, PEInstance, Side, Space, SparseVector, Variant, WellFormedness};
pub use labels::{GeneralSpace, SimpleSpace, Tag};
pub use regime::{beta_sum_residual, regime_parameters, Regime, RegimeInputs, Weights};
pub use simple::{build_simple_instance, simple_witnesses};
pub use witness::{verify_witnesses, Witness, WitnessReport};
