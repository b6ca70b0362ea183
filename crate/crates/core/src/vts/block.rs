use super::SubroutineSpec;
use crate::error::{Error, Result};
use crate::linalg::{max_abs, unitarity_residual, CMatrix, CVector, TolerancePolicy, C64};

/// A block algorithm: run block 1, measure `{Π, I − Π}` on the workspace, halt
/// on success, otherwise continue with block 2, and so on.
///
/// `unitaries[t-1][i]` acts on `H_A ⊗ H_{Z'}` with index `a·|Z'| + z'`; the
/// input register is handled by indexing on `i`.
#[derive(Debug, Clone)]
pub struct BlockSchedule {
    pub n_inputs: usize,
    pub workspace: usize,
    pub block_lengths: Vec<usize>,
    pub unitaries: Vec<Vec<CMatrix>>,
    pub measurement: CMatrix,
}

impl BlockSchedule {
    pub fn steps(&self) -> usize {
        self.block_lengths.iter().sum()
    }

    pub fn blocks(&self) -> usize {
        self.block_lengths.len()
    }

    /// Last step of each block.
    pub fn block_ends(&self) -> Vec<usize> {
        self.block_lengths
            .iter()
            .scan(0, |acc, n| {
                *acc += n;
                Some(*acc)
            })
            .collect()
    }

    /// Workspace label of `|z'⟩_{Z'} |flag⟩_F |counter⟩_C` in the augmented subroutine.
    pub fn label(&self, zp: usize, flag: usize, counter: usize) -> usize {
        (zp * 2 + flag) * (self.blocks() + 1) + counter
    }

    fn check(&self, tol: &TolerancePolicy) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedSchedule(m));
        if self.n_inputs == 0 || self.workspace == 0 {
            return bad("inputs and workspace must be positive".into());
        }
        if self.block_lengths.is_empty() || self.block_lengths.contains(&0) {
            return bad("need at least one block, each of positive length".into());
        }
        if self.unitaries.len() != self.steps() || self.unitaries.iter().any(|r| r.len() != self.n_inputs) {
            return bad(format!("expected {} steps × {} inputs of unitaries", self.steps(), self.n_inputs));
        }
        let d = 2 * self.workspace;
        for (t, row) in self.unitaries.iter().enumerate() {
            for (i, u) in row.iter().enumerate() {
                if u.nrows() != d || u.ncols() != d {
                    return bad(format!("unitary ({}, {i}) is not {d}×{d}", t + 1));
                }
                let r = unitarity_residual(u);
                if r > tol.assert_tol {
                    return bad(format!("unitary ({}, {i}) not unitary, residual {r:e}", t + 1));
                }
            }
        }
        let p = &self.measurement;
        if p.nrows() != self.workspace || p.ncols() != self.workspace {
            return bad("measurement must act on the workspace".into());
        }
        if max_abs(&(p - p.adjoint())) > tol.assert_tol || max_abs(&(p * p - p)) > tol.assert_tol {
            return bad("measurement is not an orthogonal projector".into());
        }
        Ok(())
    }

    /// Direct simulation of the measured block algorithm on input `i`:
    /// returns the halting-time pmf over `0..=T` and the answer distribution.
    pub fn simulate_measured(&self, i: usize) -> (Vec<f64>, [f64; 2]) {
        let zp = self.workspace;
        let t_max = self.steps();
        let mut pmf = vec![0.0; t_max + 1];
        let mut answer = [0.0; 2];
        let mut psi = CVector::zeros(2 * zp);
        psi[0] = C64::new(1.0, 0.0);
        let ends = self.block_ends();
        let mut t = 0;
        for (k, &end) in ends.iter().enumerate() {
            while t < end {
                t += 1;
                psi = &self.unitaries[t - 1][i] * psi;
            }
            let last = k + 1 == ends.len();
            let mut done = psi.clone();
            if !last {
                for a in 0..2 {
                    let part = &self.measurement * psi.rows(a * zp, zp);
                    done.rows_mut(a * zp, zp).copy_from(&part);
                }
            }
            pmf[end] = done.norm_squared();
            for (a, slot) in answer.iter_mut().enumerate() {
                *slot += done.rows(a * zp, zp).norm_squared();
            }
            psi -= done;
        }
        (pmf, answer)
    }
}

/// Turns a block algorithm into a variable-time subroutine with workspace
/// `Z' × {0,1}_F × {0,…,B}_C`.
///
/// Inside a block `U_t` applies `Ũ_t` controlled on `F = 0`. At the end of
/// block `k` it then coherently measures `Π` controlled on `C = k − 1`, xoring
/// the outcome into `F`, and increments `C` controlled on `F = 0`. A label with
/// `F = 1, C = c < B` halts at the end of block `c + 1`; all others at `T`.
/// Claimed outputs are the more likely final answers.
pub fn build_block_subroutine(schedule: &BlockSchedule, tol: &TolerancePolicy) -> Result<SubroutineSpec> {
    schedule.check(tol)?;
    let zp = schedule.workspace;
    let b = schedule.blocks();
    let cdim = b + 1;
    let zdim = zp * 2 * cdim;
    let d = 2 * zdim;
    let t_max = schedule.steps();
    let ends = schedule.block_ends();
    let idx = |a: usize, z: usize, f: usize, c: usize| a * zdim + schedule.label(z, f, c);
    let one = C64::new(1.0, 0.0);

    let mut halt_step = vec![t_max; zdim];
    for z in 0..zp {
        for (c, &end) in ends.iter().enumerate() {
            halt_step[schedule.label(z, 1, c)] = end;
        }
    }

    let mut unitaries = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        let block_end = ends.iter().position(|&e| e == t);
        let mut row = Vec::with_capacity(schedule.n_inputs);
        for i in 0..schedule.n_inputs {
            let ut = &schedule.unitaries[t - 1][i];
            let mut m1 = CMatrix::zeros(d, d);
            for c in 0..cdim {
                for a in 0..2 {
                    for z in 0..zp {
                        m1[(idx(a, z, 1, c), idx(a, z, 1, c))] = one;
                        for a2 in 0..2 {
                            for z2 in 0..zp {
                                m1[(idx(a2, z2, 0, c), idx(a, z, 0, c))] = ut[(a2 * zp + z2, a * zp + z)];
                            }
                        }
                    }
                }
            }
            let Some(k) = block_end else {
                row.push(m1);
                continue;
            };
            let p = &schedule.measurement;
            let mut m2 = CMatrix::identity(d, d);
            for a in 0..2 {
                for z in 0..zp {
                    for f in 0..2 {
                        let col = idx(a, z, f, k);
                        m2[(col, col)] = C64::new(0.0, 0.0);
                        for z2 in 0..zp {
                            let delta = if z2 == z { one } else { C64::new(0.0, 0.0) };
                            m2[(idx(a, z2, 1 - f, k), col)] += p[(z2, z)];
                            m2[(idx(a, z2, f, k), col)] += delta - p[(z2, z)];
                        }
                    }
                }
            }
            let mut m3 = CMatrix::zeros(d, d);
            for a in 0..2 {
                for z in 0..zp {
                    for c in 0..cdim {
                        m3[(idx(a, z, 1, c), idx(a, z, 1, c))] = one;
                        m3[(idx(a, z, 0, (c + 1) % cdim), idx(a, z, 0, c))] = one;
                    }
                }
            }
            row.push(m3 * m2 * m1);
        }
        unitaries.push(row);
    }
    let mut spec = SubroutineSpec::new(schedule.n_inputs, t_max, zdim, halt_step, unitaries, vec![false; schedule.n_inputs])?;
    for i in 0..schedule.n_inputs {
        let p = spec.answer_distribution(i)?;
        spec.outputs[i] = p[1] > p[0];
    }
    Ok(spec)
}
