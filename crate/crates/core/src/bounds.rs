//! Variable-time search cost radicals, with logarithmic factors dropped.
//!
//! `ε = min_{f∈P₁} Σ_{i:f(i)=1} π(i)`. The `P₁` family is described by a
//! [`PromiseDescriptor`]; for the unique-marked promise with checking time at
//! most `T_max`, marked-set minima are evaluated with `E[T_m] = T_max`, which
//! is how the unique-marked comparison table is stated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grover::CostProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Naive,
    L2,
    L1,
    L0,
    StraightLine,
    RegimeIA,
    RegimeIB,
    RegimeIIA,
    RegimeIIB,
    RegimeIIC,
}

impl BoundKind {
    pub const ALL: [BoundKind; 10] = [
        BoundKind::Naive,
        BoundKind::L2,
        BoundKind::L1,
        BoundKind::L0,
        BoundKind::StraightLine,
        BoundKind::RegimeIA,
        BoundKind::RegimeIB,
        BoundKind::RegimeIIA,
        BoundKind::RegimeIIB,
        BoundKind::RegimeIIC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Naive => "naive",
            BoundKind::L2 => "l2",
            BoundKind::L1 => "l1",
            BoundKind::L0 => "l0",
            BoundKind::StraightLine => "straight_line",
            BoundKind::RegimeIA => "regime_i_a",
            BoundKind::RegimeIB => "regime_i_b",
            BoundKind::RegimeIIA => "regime_ii_a",
            BoundKind::RegimeIIB => "regime_ii_b",
            BoundKind::RegimeIIC => "regime_ii_c",
        }
    }
}

/// Which inputs may be marked when the answer is "yes".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkedPromise {
    /// A single known marked set `M_f`.
    Explicit(Vec<usize>),
    /// An explicit list of admissible marked sets.
    Family(Vec<Vec<usize>>),
    /// Exactly one marked element, whose checking time is at most `t_max`.
    UniqueMarked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromiseDescriptor {
    pub marked: MarkedPromise,
    /// `μ = min |M_f|`; derived from the family when absent.
    pub mu: Option<f64>,
    /// `Σ_{M_f} 1/E[T_j]²` for regime (i b).
    pub k_i_b: Option<f64>,
    /// `min Σ_{M_f} 1/E[T_j]` for regime (ii b).
    pub k_ii_b: Option<f64>,
    /// `min Σ_{M_f} 1/E[T_j²]` for regime (ii c).
    pub k_ii_c: Option<f64>,
    pub t_max: Option<f64>,
}

impl PromiseDescriptor {
    pub fn explicit(marked: Vec<usize>) -> Self {
        Self { marked: MarkedPromise::Explicit(marked), mu: None, k_i_b: None, k_ii_b: None, k_ii_c: None, t_max: None }
    }

    pub fn unique_marked(t_max: f64) -> Self {
        Self { marked: MarkedPromise::UniqueMarked, mu: None, k_i_b: None, k_ii_b: None, k_ii_c: None, t_max: Some(t_max) }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Some(mu) = self.mu {
            if !(mu >= 1.0) {
                return Err(Error::MissingPromise(format!("μ must be at least 1, got {mu}")));
            }
        }
        let sets: Vec<&Vec<usize>> = match &self.marked {
            MarkedPromise::Explicit(m) => vec![m],
            MarkedPromise::Family(f) => f.iter().collect(),
            MarkedPromise::UniqueMarked => Vec::new(),
        };
        if matches!(&self.marked, MarkedPromise::Family(f) if f.is_empty()) {
            return Err(Error::EmptyMarkedSet);
        }
        for s in sets {
            if s.is_empty() {
                return Err(Error::EmptyMarkedSet);
            }
            if let Some(&i) = s.iter().find(|&&i| i >= n) {
                return Err(Error::OutOfRange { index: i, len: n });
            }
        }
        Ok(())
    }

    /// `min_{f∈P₁} Σ_{i∈M_f} g(i)`; under the unique-marked promise the
    /// minimum is over `unique(i)` instead.
    fn min_over_family(&self, n: usize, g: impl Fn(usize) -> f64, unique: impl Fn(usize) -> f64) -> f64 {
        match &self.marked {
            MarkedPromise::Explicit(m) => m.iter().map(|&i| g(i)).sum(),
            MarkedPromise::Family(f) => f.iter().map(|m| m.iter().map(|&i| g(i)).sum::<f64>()).fold(f64::INFINITY, f64::min),
            MarkedPromise::UniqueMarked => (0..n).map(unique).fold(f64::INFINITY, f64::min),
        }
    }

    fn t_max(&self) -> Result<f64> {
        self.t_max.ok_or_else(|| Error::MissingPromise("T_max".into()))
    }

    fn unique_needs_t_max(&self) -> Result<Option<f64>> {
        match self.marked {
            MarkedPromise::UniqueMarked => self.t_max().map(Some),
            _ => Ok(None),
        }
    }
}

/// Value of one cost radical.
pub fn bound(kind: BoundKind, profile: &CostProfile, promise: &PromiseDescriptor) -> Result<f64> {
    profile.validate()?;
    let n = profile.n();
    promise.validate(n)?;
    let pi = &profile.pi;
    let e = &profile.exp_t;
    let e2 = &profile.exp_t2;
    let nf = n as f64;
    let tmax_unique = promise.unique_needs_t_max()?;
    let eps = promise.min_over_family(n, |i| pi[i], |i| pi[i]);
    let mu = || -> f64 {
        promise.mu.unwrap_or_else(|| match &promise.marked {
            MarkedPromise::Explicit(m) => m.len() as f64,
            MarkedPromise::Family(f) => f.iter().map(|m| m.len()).min().unwrap_or(0) as f64,
            MarkedPromise::UniqueMarked => 1.0,
        })
    };
    // only read under the unique-marked promise, where it is present
    let tm = tmax_unique.unwrap_or(f64::NAN);
    let value = match kind {
        BoundKind::Naive => e.iter().copied().fold(0.0, f64::max) / eps.sqrt(),
        BoundKind::L2 => (pi.iter().zip(e2).map(|(p, x)| p * x).sum::<f64>() / eps).sqrt(),
        BoundKind::L1 => {
            let denom = promise.min_over_family(n, |i| pi[i] / e[i], |i| pi[i] / tm);
            (pi.iter().zip(e).map(|(p, x)| p * x).sum::<f64>() / denom).sqrt()
        }
        BoundKind::L0 => {
            let denom = promise.min_over_family(n, |i| pi[i] / e2[i], |i| pi[i] / (tm * tm));
            1.0 / denom.sqrt()
        }
        BoundKind::StraightLine => {
            let t_max = promise.t_max()?;
            nf.sqrt() * (e.iter().sum::<f64>() / nf + t_max)
        }
        BoundKind::RegimeIA => (e.iter().map(|x| x * x).sum::<f64>() / mu()).sqrt(),
        BoundKind::RegimeIB => {
            let k = match promise.k_i_b {
                Some(k) => k,
                None => promise.min_over_family(n, |i| 1.0 / (e[i] * e[i]), |_| 1.0 / (tm * tm)),
            };
            (nf / k).sqrt()
        }
        BoundKind::RegimeIIA => (e2.iter().sum::<f64>() / mu()).sqrt(),
        BoundKind::RegimeIIB => {
            let k = match promise.k_ii_b {
                Some(k) => k,
                None => promise.min_over_family(n, |i| 1.0 / e[i], |_| 1.0 / tm),
            };
            (e.iter().sum::<f64>() / k).sqrt()
        }
        BoundKind::RegimeIIC => {
            let k = match promise.k_ii_c {
                Some(k) => k,
                None => promise.min_over_family(n, |i| 1.0 / e2[i], |_| 1.0 / (tm * tm)),
            };
            (nf / k).sqrt()
        }
    };
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidProfile(format!("{} evaluated to {value}", kind.name())));
    }
    Ok(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub naive: Option<f64>,
    pub l2: Option<f64>,
    pub l1: Option<f64>,
    pub l0: Option<f64>,
    pub straight_line: Option<f64>,
    pub regime_i_a: Option<f64>,
    pub regime_i_b: Option<f64>,
    pub regime_ii_a: Option<f64>,
    pub regime_ii_b: Option<f64>,
    pub regime_ii_c: Option<f64>,
    pub promise: PromiseDescriptor,
    pub n: usize,
}

impl CostReport {
    pub fn get(&self, kind: BoundKind) -> Option<f64> {
        match kind {
            BoundKind::Naive => self.naive,
            BoundKind::L2 => self.l2,
            BoundKind::L1 => self.l1,
            BoundKind::L0 => self.l0,
            BoundKind::StraightLine => self.straight_line,
            BoundKind::RegimeIA => self.regime_i_a,
            BoundKind::RegimeIB => self.regime_i_b,
            BoundKind::RegimeIIA => self.regime_ii_a,
            BoundKind::RegimeIIB => self.regime_ii_b,
            BoundKind::RegimeIIC => self.regime_ii_c,
        }
    }
}

/// Every bound the promise supports; kinds whose inputs are missing are `None`.
pub fn cost_report(profile: &CostProfile, promise: &PromiseDescriptor) -> Result<CostReport> {
    profile.validate()?;
    promise.validate(profile.n())?;
    let v = |k| bound(k, profile, promise).ok();
    Ok(CostReport {
        naive: v(BoundKind::Naive),
        l2: v(BoundKind::L2),
        l1: v(BoundKind::L1),
        l0: v(BoundKind::L0),
        straight_line: v(BoundKind::StraightLine),
        regime_i_a: v(BoundKind::RegimeIA),
        regime_i_b: v(BoundKind::RegimeIB),
        regime_ii_a: v(BoundKind::RegimeIIA),
        regime_ii_b: v(BoundKind::RegimeIIB),
        regime_ii_c: v(BoundKind::RegimeIIC),
        promise: promise.clone(),
        n: profile.n(),
    })
}

/// The unique-marked comparison: ℓ₂, ℓ₁, ℓ₀ and straight-line composition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareTable {
    pub l2: f64,
    pub l1: f64,
    pub l0: f64,
    pub straight_line: f64,
    pub l1_over_l2: f64,
    pub l0_over_l1: f64,
    pub straight_over_l1: f64,
    /// ℓ₂ ≤ ℓ₁ ≤ ℓ₀ up to 1e−12 relative slack.
    pub ordering_holds: bool,
    /// straight_line ≥ ℓ₁, i.e. arithmetic mean ≥ geometric mean.
    pub am_gm_holds: bool,
}

pub fn compare_table(profile: &CostProfile, promise: &PromiseDescriptor) -> Result<CompareTable> {
    if promise.marked != MarkedPromise::UniqueMarked {
        return Err(Error::MissingPromise("comparison table needs the unique-marked promise".into()));
    }
    let t_max = promise.t_max()?;
    if let Some(i) = profile.exp_t.iter().position(|&e| e > t_max * (1.0 + 1e-12)) {
        return Err(Error::MissingPromise(format!("E[T_{i}] exceeds T_max = {t_max}")));
    }
    let b = |k| bound(k, profile, promise);
    let (l2, l1, l0, sl) = (b(BoundKind::L2)?, b(BoundKind::L1)?, b(BoundKind::L0)?, b(BoundKind::StraightLine)?);
    let le = |a: f64, c: f64| a <= c * (1.0 + 1e-12);
    Ok(CompareTable {
        l2,
        l1,
        l0,
        straight_line: sl,
        l1_over_l2: l1 / l2,
        l0_over_l1: l0 / l1,
        straight_over_l1: sl / l1,
        ordering_holds: le(l2, l1) && le(l1, l0),
        am_gm_holds: le(l1, sl),
    })
}
