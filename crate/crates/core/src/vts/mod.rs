//! Variable-time subroutines.
//!
//! A subroutine on `N` inputs runs `T` steps on `H_A ⊗ H_Z`, where `H_A` is the
//! one-qubit answer register and `H_Z` the workspace spanned by labels
//! `0..|Z|`. Basis index of `|a, z⟩` is `a·|Z| + z`. Every workspace label `z`
//! carries the step `halt_step[z] ∈ 1..=T` at which it becomes "done", so
//! `Z_{≤t} = {z : halt_step[z] ≤ t}` and `H_t = H_A ⊗ span(Z_{≤t})`.

mod block;
mod profile;
mod random;

pub use block::{build_block_subroutine, BlockSchedule};
pub use profile::{profile_moments, stopping_profile, Moments, StoppingProfile};
pub use random::{haar_unitary, random_subroutine, RandomSubroutineParams};

use crate::error::{Error, Result};
use crate::linalg::{basis_vector, check_dim, unitarity_residual, CMatrix, CVector, TolerancePolicy, C64};
use crate::textfmt::{fmt_f64, parse_token, TextDoc};

#[derive(Debug, Clone, PartialEq)]
pub struct SubroutineSpec {
    n_inputs: usize,
    steps: usize,
    workspace: usize,
    halt_step: Vec<usize>,
    /// `unitaries[t-1][i]` is `U_t^i`, a `2|Z| × 2|Z|` matrix.
    unitaries: Vec<Vec<CMatrix>>,
    outputs: Vec<bool>,
}

impl SubroutineSpec {
    /// Shape checks only; semantic checks live in [`validate`].
    pub fn new(
        n_inputs: usize,
        steps: usize,
        workspace: usize,
        halt_step: Vec<usize>,
        unitaries: Vec<Vec<CMatrix>>,
        outputs: Vec<bool>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::MalformedSubroutine(m));
        if n_inputs == 0 || steps == 0 || workspace == 0 {
            return bad("inputs, steps and workspace must be positive".into());
        }
        check_dim(2 * workspace)?;
        if halt_step.len() != workspace {
            return bad(format!("halt_step has {} entries for {workspace} labels", halt_step.len()));
        }
        if outputs.len() != n_inputs {
            return bad(format!("{} outputs for {n_inputs} inputs", outputs.len()));
        }
        if unitaries.len() != steps || unitaries.iter().any(|row| row.len() != n_inputs) {
            return bad("unitaries must be indexed [step][input]".into());
        }
        let d = 2 * workspace;
        if unitaries.iter().flatten().any(|u| u.nrows() != d || u.ncols() != d) {
            return bad(format!("every unitary must be {d}×{d}"));
        }
        Ok(Self { n_inputs, steps, workspace, halt_step, unitaries, outputs })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn workspace(&self) -> usize {
        self.workspace
    }

    /// Dimension of `H_A ⊗ H_Z`.
    pub fn local_dim(&self) -> usize {
        2 * self.workspace
    }

    pub fn halt_step(&self) -> &[usize] {
        &self.halt_step
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    pub fn marked(&self) -> Vec<usize> {
        (0..self.n_inputs).filter(|&i| self.outputs[i]).collect()
    }

    pub fn unitary(&self, t: usize, i: usize) -> &CMatrix {
        &self.unitaries[t - 1][i]
    }

    pub fn index(&self, a: usize, z: usize) -> usize {
        a * self.workspace + z
    }

    /// Labels in `𝒵_t`.
    pub fn cell(&self, t: usize) -> Vec<usize> {
        (0..self.workspace).filter(|&z| self.halt_step[z] == t).collect()
    }

    /// Whether `|a, z⟩` (local index `k`) lies in `H_t`.
    pub fn halted_by(&self, k: usize, t: usize) -> bool {
        self.halt_step[k % self.workspace] <= t
    }

    /// `Π_{≤t} v`
    pub fn project_halted(&self, v: &CVector, t: usize) -> CVector {
        CVector::from_fn(v.len(), |k, _| if self.halted_by(k, t) { v[k] } else { C64::new(0.0, 0.0) })
    }

    pub fn check_input(&self, i: usize) -> Result<()> {
        if i >= self.n_inputs {
            return Err(Error::OutOfRange { index: i, len: self.n_inputs });
        }
        Ok(())
    }

    /// `φ_t = U_t^i ⋯ U_1^i |0,0⟩` for `t = 0..=T`.
    pub fn trajectory(&self, i: usize) -> Result<Vec<CVector>> {
        self.check_input(i)?;
        let mut states = Vec::with_capacity(self.steps + 1);
        let mut phi = basis_vector(self.local_dim(), 0);
        states.push(phi.clone());
        for t in 1..=self.steps {
            phi = self.unitary(t, i) * phi;
            states.push(phi.clone());
        }
        Ok(states)
    }

    /// Probabilities of reading 0 and 1 in the answer register at the end.
    pub fn answer_distribution(&self, i: usize) -> Result<[f64; 2]> {
        let phi = self.trajectory(i)?.pop().unwrap();
        let z = self.workspace;
        let p0: f64 = phi.rows(0, z).norm_squared();
        let p1: f64 = phi.rows(z, z).norm_squared();
        Ok([p0, p1])
    }

    pub fn to_text(&self) -> String {
        let mut d = TextDoc::default();
        d.push_header("kind", ["subroutine"]);
        d.push_header("inputs", [self.n_inputs]);
        d.push_header("steps", [self.steps]);
        d.push_header("workspace", [self.workspace]);
        d.push_header("outputs", self.outputs.iter().map(|&b| u8::from(b)));
        d.push_header("halt_step", self.halt_step.iter());
        for t in 1..=self.steps {
            for i in 0..self.n_inputs {
                let u = self.unitary(t, i);
                let s = d.push_section("unitary", vec![t.to_string(), i.to_string()]);
                for r in 0..u.nrows() {
                    s.rows.push((0..u.ncols()).flat_map(|c| [fmt_f64(u[(r, c)].re), fmt_f64(u[(r, c)].im)]).collect());
                }
            }
        }
        let mut text = String::from("# variable-time subroutine; basis index of |a,z> is a*workspace + z\n");
        text.push_str(&d.render());
        text
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let d = TextDoc::parse(text)?;
        if d.header_one::<String>("kind")? != "subroutine" {
            return Err(Error::Parse { line: 0, msg: "not a subroutine document".into() });
        }
        let n: usize = d.header_one("inputs")?;
        let steps: usize = d.header_one("steps")?;
        let z: usize = d.header_one("workspace")?;
        let outputs: Vec<bool> = d.header_list::<u8>("outputs")?.into_iter().map(|b| b != 0).collect();
        let halt_step: Vec<usize> = d.header_list("halt_step")?;
        check_dim(2 * z)?;
        let mut unitaries = vec![vec![CMatrix::zeros(2 * z, 2 * z); n]; steps];
        let mut seen = vec![vec![false; n]; steps];
        for s in d.sections_named("unitary") {
            if s.args.len() != 2 {
                return Err(Error::Parse { line: 0, msg: "unitary section needs `t i`".into() });
            }
            let [t, i] = [&s.args[0], &s.args[1]].map(|a| parse_token::<usize>(a));
            let (t, i) = (t?, i?);
            if t == 0 || t > steps || i >= n || s.rows.len() != 2 * z {
                return Err(Error::Parse { line: 0, msg: format!("bad unitary block ({t}, {i})") });
            }
            let m = &mut unitaries[t - 1][i];
            for (r, row) in s.rows.iter().enumerate() {
                if row.len() != 4 * z {
                    return Err(Error::Parse { line: 0, msg: format!("row {r} of unitary ({t}, {i}) has wrong length") });
                }
                for c in 0..2 * z {
                    m[(r, c)] = C64::new(parse_token(&row[2 * c])?, parse_token(&row[2 * c + 1])?);
                }
            }
            seen[t - 1][i] = true;
        }
        if seen.iter().flatten().any(|&x| !x) {
            return Err(Error::Parse { line: 0, msg: "missing unitary blocks".into() });
        }
        Self::new(n, steps, z, halt_step, unitaries, outputs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    /// Worst offender, e.g. `step 3, input 1`.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the halting partition, unitarity, invariance of `H_{t-1}` under
/// `U_t^i`, and zero error.
pub fn validate(spec: &SubroutineSpec, tol: &TolerancePolicy) -> ValidationReport {
    let mut checks = Vec::new();
    let t_max = spec.steps;

    let bad_label = spec.halt_step.iter().position(|&h| h == 0 || h > t_max);
    checks.push(CheckOutcome {
        name: "partition",
        passed: bad_label.is_none(),
        residual: if bad_label.is_some() { 1.0 } else { 0.0 },
        detail: bad_label.map(|z| format!("label {z} halts at {}", spec.halt_step[z])).unwrap_or_default(),
    });

    let mut worst_unitary = (0.0, String::new());
    let mut worst_invariance = (0.0, String::new());
    let d = spec.local_dim();
    for t in 1..=t_max {
        for i in 0..spec.n_inputs {
            let u = spec.unitary(t, i);
            let r = unitarity_residual(u);
            if r > worst_unitary.0 {
                worst_unitary = (r, format!("step {t}, input {i}"));
            }
            // U Π_{≤t-1} − Π_{≤t-1}, column by column
            let mut r: f64 = 0.0;
            for k in (0..d).filter(|&k| spec.halted_by(k, t - 1)) {
                let mut col = u.column(k).into_owned();
                col[k] -= C64::new(1.0, 0.0);
                r = r.max(col.iter().fold(0.0, |acc, z| acc.max(z.norm())));
            }
            if r > worst_invariance.0 {
                worst_invariance = (r, format!("step {t}, input {i}"));
            }
        }
    }
    for (name, (r, detail)) in [("unitarity", worst_unitary), ("invariance", worst_invariance)] {
        checks.push(CheckOutcome { name, passed: r <= tol.assert_tol, residual: r, detail });
    }

    let mut worst_error = (0.0, String::new());
    for i in 0..spec.n_inputs {
        let p = spec.answer_distribution(i).expect("input in range");
        let wrong = p[usize::from(!spec.outputs[i])].sqrt();
        if wrong > worst_error.0 {
            worst_error = (wrong, format!("input {i}"));
        }
    }
    checks.push(CheckOutcome {
        name: "zero-error",
        passed: worst_error.0 <= tol.assert_tol,
        residual: worst_error.0,
        detail: worst_error.1,
    });
    ValidationReport { checks }
}

/// Runs input `i` to completion. Returns the answer bit and the final state.
pub fn run_subroutine(spec: &SubroutineSpec, i: usize, tol: &TolerancePolicy) -> Result<(bool, CVector)> {
    let phi = spec.trajectory(i)?.pop().unwrap();
    let z = spec.workspace;
    let f = spec.outputs[i];
    let wrong = if f { phi.rows(0, z).norm() } else { phi.rows(z, z).norm() };
    if wrong > tol.assert_tol {
        return Err(Error::ZeroErrorViolation { input: i, weight: wrong });
    }
    Ok((f, phi))
}
