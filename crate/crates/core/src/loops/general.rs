//! Loop composition with a variable-time subroutine.

use serde::{Deserialize, Serialize};

use super::instance::{GeneratorGroup, PEInstance, Side, SparseVector, Space, Variant};
use super::labels::{GeneralSpace, Tag};
use super::regime::{beta_sum_residual, Weights};
use super::witness::Witness;
use crate::error::{Error, Result};
use crate::linalg::{basis_vector, check_dim, orthonormalize, CVector, Projector, TolerancePolicy, C64};
use crate::vts::{run_subroutine, stopping_profile, validate, SubroutineSpec};

/// History states of one input.
///
/// `states[t]` is `|w^t⟩` on `H_A ⊗ H_Z`; the three vectors live on the full
/// loop space.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryTriple {
    pub input: usize,
    pub answer: bool,
    pub states: Vec<CVector>,
    pub w_plus: CVector,
    pub w_minus: CVector,
    pub w_minus_prime: CVector,
}

pub fn space_of(spec: &SubroutineSpec) -> GeneralSpace {
    GeneralSpace { n: spec.n_inputs(), workspace: spec.workspace(), steps: spec.steps() }
}

fn check_alpha(alpha: &[f64], steps: usize) -> Result<()> {
    if alpha.len() != steps + 1 || alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) || alpha[0] != 1.0 {
        return Err(Error::InvalidWeights(format!("α must be {} positive values with α₀ = 1", steps + 1)));
    }
    Ok(())
}

/// `|w^0⟩ = |0,0⟩`, `|w^t⟩ = U_t (I − Π_{≤t−1}) |w^{t−1}⟩`, and
///
/// `w₊(i) = (|→,i,0⟩ + |←,i,f(i)⟩) Σ_t α_t^{-1/2} |w^t⟩|t⟩`,
/// `w₋(i) = (|→,i,0⟩ − |←,i,f(i)⟩) Σ_t (−1)^t α_t^{1/2} |w^t⟩|t⟩`,
/// `w′₋(i) = w₋(i)` minus its `t = 0` term.
pub fn history_states(spec: &SubroutineSpec, i: usize, alpha: &[f64], tol: &TolerancePolicy) -> Result<HistoryTriple> {
    let steps = spec.steps();
    check_alpha(alpha, steps)?;
    let (answer, _) = run_subroutine(spec, i, tol)?;
    let g = space_of(spec);
    check_dim(g.dim())?;
    let mut states = vec![basis_vector(spec.local_dim(), 0)];
    for t in 1..=steps {
        let prev = &states[t - 1];
        let pending = prev - spec.project_halted(prev, t - 1);
        states.push(spec.unitary(t, i) * pending);
    }
    let label = i + 1;
    let f = usize::from(answer);
    let place = |out: &mut CVector, d: Tag, b: usize, coeff: &dyn Fn(usize) -> f64, from: usize| {
        for (t, w) in states.iter().enumerate().skip(from) {
            let c = coeff(t);
            for (local, x) in w.iter().enumerate() {
                out[g.local_index(d, label, b, local, t)] += x * c;
            }
        }
    };
    let dim = g.dim();
    let mut w_plus = CVector::zeros(dim);
    place(&mut w_plus, Tag::Right, 0, &|t| 1.0 / alpha[t].sqrt(), 0);
    place(&mut w_plus, Tag::Left, f, &|t| 1.0 / alpha[t].sqrt(), 0);
    let sign = |t: usize| if t % 2 == 0 { 1.0 } else { -1.0 };
    let mut w_minus = CVector::zeros(dim);
    place(&mut w_minus, Tag::Right, 0, &|t| sign(t) * alpha[t].sqrt(), 0);
    place(&mut w_minus, Tag::Left, f, &|t| -sign(t) * alpha[t].sqrt(), 0);
    let mut w_minus_prime = CVector::zeros(dim);
    place(&mut w_minus_prime, Tag::Right, 0, &|t| sign(t) * alpha[t].sqrt(), 1);
    place(&mut w_minus_prime, Tag::Left, f, &|t| -sign(t) * alpha[t].sqrt(), 1);
    Ok(HistoryTriple { input: i, answer, states, w_plus, w_minus, w_minus_prime })
}

/// `Ψ_A = Ψ_• ∪ Ψ_even ∪ Ψ_■` and `Ψ_B = Ψ_→ ∪ Ψ_odd ∪ Ψ_← ∪ Ψ_★` on
/// `|d, i, b, a, z, t⟩`, with `ψ₀ = |∘, 0, 0, 0, 0, 0⟩`.
///
/// Membership of `Ψ_★` uses the answers computed by running the subroutine.
/// The tags `0` and `↔` are part of the space but carry no generator.
pub fn build_general_instance(spec: &SubroutineSpec, weights: &Weights, tol: &TolerancePolicy) -> Result<PEInstance> {
    let report = validate(spec, tol);
    if let Some(c) = report.checks.iter().find(|c| !c.passed) {
        return Err(Error::MalformedSubroutine(format!("{} check failed ({}, residual {:e})", c.name, c.detail, c.residual)));
    }
    let n = spec.n_inputs();
    let steps = spec.steps();
    let zn = spec.workspace();
    weights.validate(n, steps)?;
    let g = space_of(spec);
    check_dim(g.dim())?;
    let answers = (0..n).map(|j| run_subroutine(spec, j, tol).map(|r| r.0)).collect::<Result<Vec<_>>>()?;
    let marked: Vec<usize> = (0..n).filter(|&j| answers[j]).collect();
    let nf = n as f64;
    let one = C64::new(1.0, 0.0);
    let idx0 = |d, i, b, a| g.index(d, i, b, a, 0, 0);
    let inputs = || (1..=n).flat_map(|i| (0..2).flat_map(move |b| (0..2).map(move |a| (i, b, a))));
    let pair = |d1, d2, (i, b, a)| SparseVector::real([(idx0(d1, i, b, a), 1.0), (idx0(d2, i, b, a), -1.0)]);

    let bullet = SparseVector::real(
        std::iter::once((idx0(Tag::Start, 0, 0, 0), 1.0)).chain((1..=n).map(|i| (idx0(Tag::Start, i, 0, 0), -(weights.omega[i - 1] / nf).sqrt()))),
    );
    let right = inputs().map(|x| pair(Tag::Start, Tag::Right, x)).collect();
    let left = inputs().map(|x| pair(Tag::Left, Tag::Bot, x)).collect();
    let square = inputs().map(|x| pair(Tag::Bot, Tag::One, x)).collect();
    let star = (1..=n)
        .filter(|&i| !answers[i - 1])
        .flat_map(|i| (0..2).map(move |a| (i, a)))
        .map(|(i, a)| SparseVector::real([(idx0(Tag::One, i, 0, a), 1.0)]))
        .collect();

    let halt = spec.halt_step();
    let alpha = &weights.alpha;
    let mut parity: [Vec<SparseVector>; 2] = [Vec::new(), Vec::new()];
    for i in 1..=n {
        for t in 0..=steps {
            let bucket = &mut parity[t % 2];
            for b in 0..2 {
                for a in 0..2 {
                    for z in 0..zn {
                        let local = a * zn + z;
                        if halt[z] > t {
                            let u = spec.unitary(t + 1, i - 1);
                            for d in [Tag::Right, Tag::Left] {
                                let mut e = vec![(g.local_index(d, i, b, local, t), one * alpha[t].sqrt())];
                                e.extend(u.column(local).iter().enumerate().map(|(r, x)| (g.local_index(d, i, b, r, t + 1), -x * alpha[t + 1].sqrt())));
                                bucket.push(SparseVector::new(e));
                            }
                        } else if halt[z] == t {
                            bucket.push(SparseVector::real([
                                (g.index(Tag::Right, i, b, a, z, t), 1.0),
                                (g.index(Tag::Left, i, b ^ a, a, z, t), -1.0),
                            ]));
                        }
                    }
                }
            }
        }
    }
    let [even, odd] = parity;
    let groups = vec![
        GeneratorGroup { name: "bullet".into(), side: Side::A, vectors: vec![bullet] },
        GeneratorGroup { name: "even".into(), side: Side::A, vectors: even },
        GeneratorGroup { name: "square".into(), side: Side::A, vectors: square },
        GeneratorGroup { name: "right".into(), side: Side::B, vectors: right },
        GeneratorGroup { name: "odd".into(), side: Side::B, vectors: odd },
        GeneratorGroup { name: "left".into(), side: Side::B, vectors: left },
        GeneratorGroup { name: "star".into(), side: Side::B, vectors: star },
    ];
    let psi0 = SparseVector::real([(idx0(Tag::Start, 0, 0, 0), 1.0)]);
    Ok(PEInstance::from_groups(Space::General(g), psi0, groups, weights.clone(), marked, tol)?.with_source(spec.clone()))
}

fn general_source(instance: &PEInstance) -> Result<&SubroutineSpec> {
    if instance.variant() != Variant::General {
        return Err(Error::WrongVariant("expected a general instance".into()));
    }
    instance.source().ok_or_else(|| Error::WrongVariant("instance has no source subroutine".into()))
}

/// `w₊ = ψ₀ + Σ_{j∈M} √(Nβ_j/ω_j) (|∘,j,0,0,0,0⟩ + w₊(j) + |⊥,j,1,0,0,0⟩ + |1,j,1,0,0,0⟩)`
pub fn general_positive_witness(instance: &PEInstance, beta: &[(usize, f64)]) -> Result<Witness> {
    let spec = general_source(instance)?;
    let marked = instance.marked();
    if marked.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    let mut listed: Vec<usize> = beta.iter().map(|b| b.0).collect();
    listed.sort_unstable();
    if listed != marked {
        return Err(Error::InvalidWeights(format!("β is given on {listed:?}, marked set is {marked:?}")));
    }
    let r = beta_sum_residual(beta)?;
    if r > 1e-12 {
        return Err(Error::InvalidWeights(format!("Σ√β differs from 1 by {r:e}")));
    }
    let tol = instance.tolerance();
    let weights = instance.weights();
    let alpha = &weights.alpha;
    let g = space_of(spec);
    let nf = spec.n_inputs() as f64;
    let mut w = instance.psi0_full();
    let mut predicted = 1.0;
    for &(j, b) in beta {
        let h = history_states(spec, j, alpha, tol)?;
        let c = (nf * b / weights.omega[j]).sqrt();
        let i = j + 1;
        w[g.index(Tag::Start, i, 0, 0, 0, 0)] += c;
        w[g.index(Tag::Bot, i, 1, 0, 0, 0)] += c;
        w[g.index(Tag::One, i, 1, 0, 0, 0)] += c;
        w += &h.w_plus * C64::new(c, 0.0);
        let inv_alpha = stopping_profile(spec, j)?.expect_cumulative(|t| 1.0 / alpha[t]);
        predicted += nf * b / weights.omega[j] * (3.0 + 2.0 * inv_alpha);
    }
    Ok(Witness::Positive { w, predicted_norm_sq: predicted })
}

/// `w_A = ψ₀ + Σ_j √(ω_j/N) (−|∘,j,0,0,0,0⟩ + w₋(j) + (|⊥⟩ − |1⟩)|j,0,0,0,0⟩)`,
/// `w_B = ψ₀ − w_A`.
pub fn general_negative_witness(instance: &PEInstance) -> Result<Witness> {
    let spec = general_source(instance)?;
    if let Some(&j) = instance.marked().first() {
        return Err(Error::MarkedElementPresent(j));
    }
    let tol = instance.tolerance();
    let weights = instance.weights();
    let alpha = &weights.alpha;
    let g = space_of(spec);
    let n = spec.n_inputs();
    let nf = n as f64;
    let psi0 = instance.psi0_full();
    let mut w_a = psi0.clone();
    let mut predicted = 1.0;
    for j in 0..n {
        let h = history_states(spec, j, alpha, tol)?;
        let c = (weights.omega[j] / nf).sqrt();
        let i = j + 1;
        w_a[g.index(Tag::Start, i, 0, 0, 0, 0)] -= c;
        w_a[g.index(Tag::Bot, i, 0, 0, 0, 0)] += c;
        w_a[g.index(Tag::One, i, 0, 0, 0, 0)] -= c;
        w_a += &h.w_minus * C64::new(c, 0.0);
        let sum_alpha = stopping_profile(spec, j)?.expect_cumulative(|t| alpha[t]);
        predicted += weights.omega[j] / nf * (3.0 + 2.0 * sum_alpha);
    }
    let w_b = psi0 - &w_a;
    Ok(Witness::Negative { w_a, w_b, predicted_norm_sq: predicted })
}

/// Whichever witness the instance's marked set calls for, using the `β`
/// stored in its weights.
pub fn general_witness(instance: &PEInstance) -> Result<Witness> {
    if instance.marked().is_empty() {
        return general_negative_witness(instance);
    }
    let beta = instance.weights().beta.as_deref().ok_or_else(|| Error::InvalidWeights("β missing".into()))?;
    general_positive_witness(instance, beta)
}

/// Worst residuals, over all inputs, of the history-state identities
/// `‖w₊(i)‖² = 2E[Σ_{t≤T_i} 1/α_t]`, `‖w₋(i)‖² = 2E[Σ_{t≤T_i} α_t]`,
/// `Π_even w₊ = Π_odd w₊ = 0`, `w₋ ∈ span(Ψ_even)` and `w′₋ ∈ span(Ψ_odd)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryReport {
    pub norm_plus: f64,
    pub norm_minus: f64,
    pub plus_in_even: f64,
    pub plus_in_odd: f64,
    pub minus_outside_even: f64,
    pub minus_prime_outside_odd: f64,
}

impl HistoryReport {
    pub fn max(&self) -> f64 {
        [
            self.norm_plus,
            self.norm_minus,
            self.plus_in_even,
            self.plus_in_odd,
            self.minus_outside_even,
            self.minus_prime_outside_odd,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn history_report(instance: &PEInstance) -> Result<HistoryReport> {
    let spec = general_source(instance)?;
    let tol = instance.tolerance();
    let alpha = &instance.weights().alpha;
    let projector = |name: &str| -> Result<Projector> {
        Ok(Projector::from_orthonormal(instance.active_dim(), &orthonormalize(&instance.group_generators(name), tol)?))
    };
    let (even, odd) = (projector("even")?, projector("odd")?);
    let inside = |p: &Projector, v: &CVector| -> Result<f64> { Ok(p.apply(&instance.compress(v)?.0).norm()) };
    let outside = |p: &Projector, v: &CVector| -> Result<f64> {
        let (inner, rest) = instance.compress(v)?;
        Ok(p.complement(&inner).norm().hypot(rest))
    };
    let mut r = HistoryReport {
        norm_plus: 0.0,
        norm_minus: 0.0,
        plus_in_even: 0.0,
        plus_in_odd: 0.0,
        minus_outside_even: 0.0,
        minus_prime_outside_odd: 0.0,
    };
    for j in 0..spec.n_inputs() {
        let h = history_states(spec, j, alpha, tol)?;
        let profile = stopping_profile(spec, j)?;
        let plus = 2.0 * profile.expect_cumulative(|t| 1.0 / alpha[t]);
        let minus = 2.0 * profile.expect_cumulative(|t| alpha[t]);
        r.norm_plus = r.norm_plus.max((h.w_plus.norm_squared() - plus).abs());
        r.norm_minus = r.norm_minus.max((h.w_minus.norm_squared() - minus).abs());
        r.plus_in_even = r.plus_in_even.max(inside(&even, &h.w_plus)?);
        r.plus_in_odd = r.plus_in_odd.max(inside(&odd, &h.w_plus)?);
        r.minus_outside_even = r.minus_outside_even.max(outside(&even, &h.w_minus)?);
        r.minus_prime_outside_odd = r.minus_prime_outside_odd.max(outside(&odd, &h.w_minus_prime)?);
    }
    Ok(r)
}
