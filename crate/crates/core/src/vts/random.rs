//! Seeded generator of zero-error variable-time subroutines.
//!
//! The generator is `ChaCha8Rng::seed_from_u64(seed)` from `rand_chacha`; all
//! draws happen in a fixed order (partition shuffle, output bits, then for
//! each step `t` and input `i` one Ginibre matrix), so the same seed and
//! parameters always give the same subroutine.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::SubroutineSpec;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSubroutineParams {
    pub n_inputs: usize,
    pub steps: usize,
    pub workspace: usize,
    /// Relative sizes of the cells `𝒵_1..𝒵_T`; uniform when absent.
    pub halting_fractions: Option<Vec<f64>>,
    /// Claimed outputs; drawn uniformly when absent.
    pub outputs: Option<Vec<bool>>,
    /// Draw real orthogonal blocks instead of complex unitary ones.
    pub real: bool,
}

impl RandomSubroutineParams {
    pub fn new(n_inputs: usize, steps: usize, workspace: usize) -> Self {
        Self { n_inputs, steps, workspace, halting_fractions: None, outputs: None, real: false }
    }

    pub fn with_outputs(mut self, outputs: Vec<bool>) -> Self {
        self.outputs = Some(outputs);
        self
    }

    pub fn with_fractions(mut self, fractions: Vec<f64>) -> Self {
        self.halting_fractions = Some(fractions);
        self
    }

    pub fn real(mut self, real: bool) -> Self {
        self.real = real;
        self
    }
}

/// Haar-distributed unitary (or orthogonal, if `real`) of size `m`, via QR of
/// a Gaussian matrix with the phases of `diag(R)` divided out.
pub fn haar_unitary<R: Rng>(rng: &mut R, m: usize, real: bool) -> CMatrix {
    let g = CMatrix::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
        C64::new(re, im)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 { C64::new(1.0, 0.0) } else { d / d.norm() };
        for x in q.column_mut(j).iter_mut() {
            *x *= phase;
        }
    }
    q
}

/// Cell sizes by largest remainder, ties broken towards earlier cells.
fn cell_sizes(fractions: &[f64], workspace: usize) -> Vec<usize> {
    let total: f64 = fractions.iter().sum();
    let exact: Vec<f64> = fractions.iter().map(|f| f / total * workspace as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = workspace - sizes.iter().sum::<usize>();
    for &k in order.iter().take(short) {
        sizes[k] += 1;
    }
    sizes
}

/// Random zero-error subroutine.
///
/// `U_t^i = C_t W_t`: `W_t` is Haar on `H_A ⊗ span(𝒵_{>t-1})` and the
/// identity on `H_{t-1}`; `C_t` rotates, for each `z ∈ 𝒵_t`, the pair
/// `(|f(i), z⟩, |1−f(i), z⟩)` so that the wrong-answer amplitude of the
/// current state vanishes as `z` halts.
pub fn random_subroutine(seed: u64, params: &RandomSubroutineParams) -> Result<SubroutineSpec> {
    let RandomSubroutineParams { n_inputs, steps, workspace, .. } = *params;
    let infeasible = |m: String| Err(Error::InfeasiblePartition(m));
    if n_inputs == 0 || steps == 0 || workspace == 0 {
        return infeasible("inputs, steps and workspace must be positive".into());
    }
    let fractions = params.halting_fractions.clone().unwrap_or_else(|| vec![1.0; steps]);
    if fractions.len() != steps {
        return infeasible(format!("{} halting fractions for {steps} steps", fractions.len()));
    }
    if fractions.iter().any(|f| !f.is_finite() || *f < 0.0) || fractions.iter().sum::<f64>() <= 0.0 {
        return infeasible("halting fractions must be nonnegative with positive sum".into());
    }
    if let Some(o) = &params.outputs {
        if o.len() != n_inputs {
            return Err(Error::MalformedSubroutine(format!("{} outputs for {n_inputs} inputs", o.len())));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (0..workspace).collect();
    labels.shuffle(&mut rng);
    let mut halt_step = vec![0; workspace];
    let mut next = labels.into_iter();
    for (t, size) in cell_sizes(&fractions, workspace).into_iter().enumerate() {
        for z in next.by_ref().take(size) {
            halt_step[z] = t + 1;
        }
    }
    let drawn: Vec<bool> = (0..n_inputs).map(|_| rng.random::<bool>()).collect();
    let outputs = params.outputs.clone().unwrap_or(drawn);

    let d = 2 * workspace;
    let mut unitaries = vec![Vec::with_capacity(n_inputs); steps];
    let mut states: Vec<CVector> = (0..n_inputs)
        .map(|_| {
            let mut v = CVector::zeros(d);
            v[0] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    for t in 1..=steps {
        let active: Vec<usize> = (0..d).filter(|&k| halt_step[k % workspace] >= t).collect();
        let halting: Vec<usize> = (0..workspace).filter(|&z| halt_step[z] == t).collect();
        for i in 0..n_inputs {
            let w = haar_unitary(&mut rng, active.len(), params.real);
            let mut u = CMatrix::identity(d, d);
            for (r, &kr) in active.iter().enumerate() {
                for (c, &kc) in active.iter().enumerate() {
                    u[(kr, kc)] = w[(r, c)];
                }
            }
            let after = &u * &states[i];
            let good = usize::from(outputs[i]);
            let mut correction = CMatrix::identity(d, d);
            for &z in &halting {
                let (kg, kb) = (good * workspace + z, (1 - good) * workspace + z);
                let (x, y) = (after[kg], after[kb]);
                let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
                if y.norm() == 0.0 || r == 0.0 {
                    continue;
                }
                let (u0, u1) = (x / r, y / r);
                correction[(kg, kg)] = u0.conj();
                correction[(kg, kb)] = u1.conj();
                correction[(kb, kg)] = -u1;
                correction[(kb, kb)] = u0;
            }
            let ut = correction * u;
            states[i] = &ut * &states[i];
            unitaries[t - 1].push(ut);
        }
    }
    SubroutineSpec::new(n_inputs, steps, workspace, halt_step, unitaries, outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_remainder_sizes() {
        assert_eq!(cell_sizes(&[1.0, 1.0, 1.0], 4), vec![2, 1, 1]);
        assert_eq!(cell_sizes(&[0.0, 0.0, 1.0], 4), vec![0, 0, 4]);
        assert_eq!(cell_sizes(&[1.0; 8], 2), vec![1, 1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn infeasible_requests() {
        let p = RandomSubroutineParams::new(2, 3, 2).with_fractions(vec![1.0, 1.0]);
        assert!(matches!(random_subroutine(0, &p), Err(Error::InfeasiblePartition(_))));
        let p = RandomSubroutineParams::new(2, 2, 2).with_fractions(vec![0.0, 0.0]);
        assert!(random_subroutine(0, &p).is_err());
    }
}
