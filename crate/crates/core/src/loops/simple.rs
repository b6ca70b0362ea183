//! Loop instance for an oracle queried at unit cost.

use super::instance::{GeneratorGroup, PEInstance, Side, SparseVector, Space};
use super::labels::{SimpleSpace, Tag};
use super::regime::{Regime, Weights};
use super::witness::Witness;
use crate::error::{Error, Result};
use crate::grover::OracleSpec;
use crate::linalg::TolerancePolicy;

fn simple_weights(oracle: &OracleSpec, omega: f64) -> Result<Weights> {
    let n = oracle.n();
    let m = oracle.marked().len();
    let beta = (m > 0).then(|| oracle.marked().iter().map(|&j| (j, 1.0 / (m * m) as f64)).collect());
    let w = Weights { omega: vec![omega; n], alpha: vec![1.0], beta, regime: Regime::Simple, mu: None, k: None };
    w.validate(n, 0)?;
    Ok(w)
}

/// `Ψ_A = Ψ_• ∪ Ψ_■`, `Ψ_B = Ψ_♦ ∪ Ψ_★` on `|d, i, b⟩`, `ψ₀ = |∘, 0, 0⟩`.
pub fn build_simple_instance(oracle: &OracleSpec, omega: f64, tol: &TolerancePolicy) -> Result<PEInstance> {
    let n = oracle.n();
    if n < 2 {
        return Err(Error::UnsupportedOracle(format!("need N ≥ 2, got {n}")));
    }
    let weights = simple_weights(oracle, omega)?;
    let s = SimpleSpace { n };
    let c = (omega / n as f64).sqrt();

    let bullet = SparseVector::real(std::iter::once((s.index(Tag::Start, 0, 0), 1.0)).chain((0..n).map(|i| (s.index(Tag::Zero, i, 0), -c))));
    let diamond = (0..n).map(|i| SparseVector::real([(s.index(Tag::Zero, i, 0), 1.0), (s.index(Tag::Bot, i, 0), -1.0)])).collect();
    let square = (0..n)
        .flat_map(|i| (0..2).map(move |b| (i, b)))
        .map(|(i, b)| SparseVector::real([(s.index(Tag::Bot, i, b), 1.0), (s.index(Tag::One, i, b), -1.0)]))
        .collect();
    let star = (0..n).filter(|&i| !oracle.is_marked(i)).map(|i| SparseVector::real([(s.index(Tag::One, i, 0), 1.0)])).collect();

    let groups = vec![
        GeneratorGroup { name: "bullet".into(), side: Side::A, vectors: vec![bullet] },
        GeneratorGroup { name: "square".into(), side: Side::A, vectors: square },
        GeneratorGroup { name: "diamond".into(), side: Side::B, vectors: diamond },
        GeneratorGroup { name: "star".into(), side: Side::B, vectors: star },
    ];
    let psi0 = SparseVector::real([(s.index(Tag::Start, 0, 0), 1.0)]);
    PEInstance::from_groups(Space::Simple(s), psi0, groups, weights, oracle.marked().to_vec(), tol)
}

/// Positive witness when some element is marked, negative pair otherwise.
///
/// Positive: `|∘,0,0⟩ + Σ_{i∈M} (1/|M|)√(N/ω)(|0,i,0⟩ + |⊥,i,0⟩ + |1,i,0⟩)`,
/// with squared norm `1 + 3N/(|M|ω)`.
/// Negative: `w_A = |∘,0,0⟩ + Σ_i √(ω/N)(−|0,i,0⟩ + |⊥,i,0⟩ − |1,i,0⟩)`,
/// `w_B = ψ₀ − w_A`, with `‖w_A‖² = 1 + 3ω`.
pub fn simple_witnesses(oracle: &OracleSpec, omega: f64) -> Result<Witness> {
    let n = oracle.n();
    if n < 2 || !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidWeights(format!("need N ≥ 2 and ω > 0, got N = {n}, ω = {omega}")));
    }
    let s = SimpleSpace { n };
    let nf = n as f64;
    let start = (s.index(Tag::Start, 0, 0), 1.0);
    let marked = oracle.marked();
    if !marked.is_empty() {
        let c = (nf / omega).sqrt() / marked.len() as f64;
        let entries = marked.iter().flat_map(|&i| [Tag::Zero, Tag::Bot, Tag::One].map(|d| (s.index(d, i, 0), c)));
        let w = SparseVector::real(std::iter::once(start).chain(entries)).to_dense(s.dim());
        let predicted = 1.0 + 3.0 * nf / (marked.len() as f64 * omega);
        return Ok(Witness::Positive { w, predicted_norm_sq: predicted });
    }
    let c = (omega / nf).sqrt();
    let entries = (0..n).flat_map(|i| [(s.index(Tag::Zero, i, 0), -c), (s.index(Tag::Bot, i, 0), c), (s.index(Tag::One, i, 0), -c)]);
    let w_a = SparseVector::real(std::iter::once(start).chain(entries)).to_dense(s.dim());
    let w_b = SparseVector::real([start]).to_dense(s.dim()) - &w_a;
    Ok(Witness::Negative { w_a, w_b, predicted_norm_sq: 1.0 + 3.0 * omega })
}
