//! Grover search with per-call instrumentation.
//!
//! `U_f = 2Σ_{f(i)=0}|i⟩⟨i| − I` and `U_π = 2|π⟩⟨π| − I` are built as explicit
//! matrices. With one marked element `m` and `a = arcsin(1/√N)`, the state
//! after `t` iterations is `sin((2t+1)a)|m⟩ + cos((2t+1)a)|bad⟩`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::vts::{profile_moments, StoppingProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    n: usize,
    marked: Vec<usize>,
}

impl OracleSpec {
    pub fn new(n: usize, mut marked: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedOracle("empty domain".into()));
        }
        if let Some(&i) = marked.iter().find(|&&i| i >= n) {
            return Err(Error::OutOfRange { index: i, len: n });
        }
        marked.sort_unstable();
        marked.dedup();
        Ok(Self { n, marked })
    }

    pub fn unmarked(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn unique(n: usize, m: usize) -> Result<Self> {
        Self::new(n, vec![m])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn is_marked(&self, i: usize) -> bool {
        self.marked.binary_search(&i).is_ok()
    }

    pub fn u_f(&self) -> CMatrix {
        let diag = CVector::from_fn(self.n, |i, _| C64::new(if self.is_marked(i) { -1.0 } else { 1.0 }, 0.0));
        CMatrix::from_diagonal(&diag)
    }
}

pub fn uniform_state(n: usize) -> CVector {
    CVector::from_element(n, C64::new(1.0 / (n as f64).sqrt(), 0.0))
}

pub fn u_pi(n: usize) -> CMatrix {
    let pi = uniform_state(n);
    &pi * pi.adjoint() * C64::new(2.0, 0.0) - CMatrix::identity(n, n)
}

/// `U_π U_f`
pub fn grover_iterate(oracle: &OracleSpec) -> CMatrix {
    u_pi(oracle.n) * oracle.u_f()
}

/// `a = arcsin(1/√N)`
pub fn grover_angle(n: usize) -> f64 {
    (1.0 / (n as f64).sqrt()).asin()
}

/// `⌊(π/4)√N⌉`, rounding halves away from zero.
pub fn query_count(n: usize) -> usize {
    (PI / 4.0 * (n as f64).sqrt()).round() as usize
}

/// `(U_π U_f)^t |π⟩` by repeated matrix–vector products.
pub fn grover_state(oracle: &OracleSpec, t: usize) -> CVector {
    let g = grover_iterate(oracle);
    let mut psi = uniform_state(oracle.n);
    for _ in 0..t {
        psi = &g * psi;
    }
    psi
}

/// The single-marked-element state `sin((2t+1)a)|m⟩ + cos((2t+1)a)|bad⟩`.
pub fn closed_form_state(n: usize, m: usize, t: usize) -> CVector {
    let th = (2 * t + 1) as f64 * grover_angle(n);
    let bad = th.cos() / ((n - 1) as f64).sqrt();
    CVector::from_fn(n, |i, _| C64::new(if i == m { th.sin() } else { bad }, 0.0))
}

/// `sin²((2t+1)·arcsin(1/√N))`: success probability after `t` iterations with
/// a unique marked element.
pub fn success_probability(n: usize, t: usize) -> f64 {
    ((2 * t + 1) as f64 * grover_angle(n)).sin().powi(2)
}

/// Query weights of the outer Grover loop.
///
/// `q[i][t-1] = ‖Π_i ψ_t‖²` with `ψ_t = (U_π U_f)^{t-1}|π⟩` the state just
/// before the `t`-th oracle call, `t = 1..=Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryWeightTable {
    pub queries: usize,
    pub q: Vec<Vec<f64>>,
    pub q_bar: Vec<f64>,
    /// Largest deviation from the closed forms, when they apply (`|M_f| ≤ 1`).
    pub closed_form_residual: Option<f64>,
    /// Set when `|M_f| > 1`: only the numeric table is meaningful.
    pub closed_form_unsupported: bool,
}

impl QueryWeightTable {
    /// Largest `|Σ_i q_{i,t} − 1|` over `t`.
    pub fn column_sum_residual(&self) -> f64 {
        (0..self.queries)
            .map(|t| (self.q.iter().map(|row| row[t]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-form `q_{i,t}` for `|M_f| ≤ 1`.
pub fn closed_form_weight(n: usize, marked: Option<usize>, i: usize, t: usize) -> f64 {
    let Some(m) = marked else {
        return 1.0 / n as f64;
    };
    let th = (2 * t - 1) as f64 * grover_angle(n);
    if i == m {
        th.sin().powi(2)
    } else {
        th.cos().powi(2) / (n - 1) as f64
    }
}

pub fn query_weights(oracle: &OracleSpec) -> QueryWeightTable {
    let n = oracle.n;
    let queries = query_count(n);
    let g = grover_iterate(oracle);
    let mut q = vec![vec![0.0; queries]; n];
    let mut psi = uniform_state(n);
    for t in 1..=queries {
        if t > 1 {
            psi = &g * psi;
        }
        for (i, row) in q.iter_mut().enumerate() {
            row[t - 1] = psi[i].norm_sqr();
        }
    }
    let q_bar = q.iter().map(|row| row.iter().sum::<f64>() / queries.max(1) as f64).collect();
    let unsupported = oracle.marked.len() > 1;
    let closed_form_residual = (!unsupported).then(|| {
        let m = oracle.marked.first().copied();
        let mut worst: f64 = 0.0;
        for (i, row) in q.iter().enumerate() {
            for (t, &v) in row.iter().enumerate() {
                worst = worst.max((v - closed_form_weight(n, m, i, t + 1)).abs());
            }
        }
        worst
    });
    QueryWeightTable { queries, q, q_bar, closed_form_residual, closed_form_unsupported: unsupported }
}

/// Expected checking costs per input and the sampling distribution `π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostProfile {
    pub exp_t: Vec<f64>,
    pub exp_t2: Vec<f64>,
    pub exp_log_t: Vec<f64>,
    pub pi: Vec<f64>,
}

impl CostProfile {
    pub fn new(exp_t: Vec<f64>, exp_t2: Vec<f64>, exp_log_t: Vec<f64>, pi: Vec<f64>) -> Result<Self> {
        let p = Self { exp_t, exp_t2, exp_log_t, pi };
        p.validate()?;
        Ok(p)
    }

    /// Fixed checking times `T_i`, uniform `π`.
    pub fn deterministic(times: &[f64]) -> Result<Self> {
        let n = times.len();
        Self::new(
            times.to_vec(),
            times.iter().map(|t| t * t).collect(),
            times.iter().map(|t| t.ln()).collect(),
            vec![1.0 / n as f64; n],
        )
    }

    /// Moments of exact stopping profiles, uniform `π`.
    pub fn from_profiles(profiles: &[StoppingProfile]) -> Result<Self> {
        let m: Vec<_> = profiles.iter().map(profile_moments).collect();
        let n = m.len();
        Self::new(
            m.iter().map(|x| x.mean).collect(),
            m.iter().map(|x| x.second).collect(),
            m.iter().map(|x| x.log_mean).collect(),
            vec![1.0 / n as f64; n],
        )
    }

    pub fn n(&self) -> usize {
        self.exp_t.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.exp_t.len();
        let bad = |m: String| Err(Error::InvalidProfile(m));
        if n == 0 || self.exp_t2.len() != n || self.exp_log_t.len() != n || self.pi.len() != n {
            return bad("all profile vectors need the same positive length".into());
        }
        for i in 0..n {
            let (e, e2) = (self.exp_t[i], self.exp_t2[i]);
            if !(e.is_finite() && e2.is_finite()) || e < 1.0 - 1e-12 || e2 < e * e * (1.0 - 1e-12) {
                return bad(format!("input {i}: need E[T²] ≥ E[T]² ≥ 1, got E[T]={e}, E[T²]={e2}"));
            }
        }
        if self.pi.iter().any(|p| !p.is_finite() || *p < 0.0) || (self.pi.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return bad("π must be a probability distribution".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageQueryCost {
    /// `Σ_i q̄_i E[T_i]` from the simulated table.
    pub numeric: f64,
    /// `Σ_{i≠m} E[T_i]/(2(N−1)) + E[T_m]/2`
    pub midpoint: f64,
    /// `(S/(2Q))·(Σ_{i≠m} E[T_i]/(N−1) − E[T_m])` with `S = Σ_{t<Q} cos((4t+2)a)`.
    pub correction: f64,
    pub closed_form: f64,
}

/// Average query cost `L_f` of Grover's loop against expected checking costs.
pub fn average_query_cost(oracle: &OracleSpec, costs: &CostProfile) -> Result<AverageQueryCost> {
    if oracle.marked.len() != 1 {
        return Err(Error::UnsupportedOracle(format!("need a unique marked element, have {}", oracle.marked.len())));
    }
    let n = oracle.n;
    if costs.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: costs.n() });
    }
    let m = oracle.marked[0];
    let table = query_weights(oracle);
    let numeric = table.q_bar.iter().zip(&costs.exp_t).map(|(q, e)| q * e).sum();
    let rest: f64 = (0..n).filter(|&i| i != m).map(|i| costs.exp_t[i]).sum::<f64>() / (n - 1) as f64;
    let midpoint = rest / 2.0 + costs.exp_t[m] / 2.0;
    let s = lagrange_cos_sum(n).numeric;
    let correction = s / (2.0 * table.queries as f64) * (rest - costs.exp_t[m]);
    Ok(AverageQueryCost { numeric, midpoint, correction, closed_form: midpoint + correction })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangeSum {
    pub queries: usize,
    /// `Σ_{t=0}^{Q-1} cos((4t+2)a)`
    pub numeric: f64,
    /// `sin(4Qa) / (2 sin 2a)`
    pub closed_form: f64,
    /// `(π/8)|π/a − π√N − 4|`
    pub bound: f64,
}

pub fn lagrange_cos_sum(n: usize) -> LagrangeSum {
    let a = grover_angle(n);
    let queries = query_count(n);
    let numeric = (0..queries).map(|t| ((4 * t + 2) as f64 * a).cos()).sum();
    let closed_form = (4.0 * queries as f64 * a).sin() / (2.0 * (2.0 * a).sin());
    let bound = PI / 8.0 * (PI / a - PI * (n as f64).sqrt() - 4.0).abs();
    LagrangeSum { queries, numeric, closed_form, bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn query_counts() {
        assert_eq!(query_count(4), 2);
        assert_eq!(query_count(16), 3);
        assert_eq!(query_count(64), 6);
    }

    #[test]
    fn reflections_are_involutions() {
        let o = OracleSpec::new(8, vec![1, 5]).unwrap();
        let id = CMatrix::identity(8, 8);
        assert!(max_abs(&(o.u_f() * o.u_f() - &id)) < 1e-12);
        assert!(max_abs(&(u_pi(8) * u_pi(8) - &id)) < 1e-12);
    }

    #[test]
    fn spot_values() {
        assert!((success_probability(4, 1) - 1.0).abs() < 1e-15);
        assert!((success_probability(16, 0) - 1.0 / 16.0).abs() < 1e-15);
        let o = OracleSpec::unique(4, 2).unwrap();
        assert!((grover_state(&o, 1)[2].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn average_cost_rejects_non_unique() {
        let c = CostProfile::deterministic(&[1.0; 4]).unwrap();
        assert!(average_query_cost(&OracleSpec::unmarked(4).unwrap(), &c).is_err());
    }

    #[test]
    fn profile_validation() {
        assert!(CostProfile::deterministic(&[0.5, 1.0]).is_err());
        assert!(CostProfile::new(vec![2.0], vec![3.0], vec![0.0], vec![1.0]).is_err());
    }
}
