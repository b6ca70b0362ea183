use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vts::Moments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "simple")]
    Simple,
    /// Known costs, `ω_i ∝ E[T_i]/μ`.
    #[serde(rename = "i-a")]
    IA,
    /// Known costs, `ω_i ∝ 1/(k E[T_i])`.
    #[serde(rename = "i-b")]
    IB,
    /// Unknown costs, `α_t = t + 1`.
    #[serde(rename = "ii-a")]
    IIA,
    /// Unknown costs, `α_t = 1`.
    #[serde(rename = "ii-b")]
    IIB,
    /// Unknown costs, `α_t = 1/(t + 1)`.
    #[serde(rename = "ii-c")]
    IIC,
    #[serde(rename = "custom")]
    Custom,
}

impl Regime {
    pub const GENERAL: [Regime; 5] = [Regime::IA, Regime::IB, Regime::IIA, Regime::IIB, Regime::IIC];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Simple => "simple",
            Regime::IA => "i-a",
            Regime::IB => "i-b",
            Regime::IIA => "ii-a",
            Regime::IIB => "ii-b",
            Regime::IIC => "ii-c",
            Regime::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [Regime::Simple, Regime::IA, Regime::IB, Regime::IIA, Regime::IIB, Regime::IIC, Regime::Custom]
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidWeights(format!("unknown regime `{s}`")))
    }

    /// The `c₊` the analysis claims for this regime.
    pub fn nominal_c_plus(self) -> f64 {
        match self {
            Regime::Simple => 4.0,
            Regime::IIC => 6.0,
            _ => 8.0,
        }
    }

    pub fn alpha(self, t: usize) -> f64 {
        match self {
            Regime::IIA => (t + 1) as f64,
            Regime::IIC => 1.0 / (t + 1) as f64,
            _ => 1.0,
        }
    }
}

/// Parameters of a loop instance.
///
/// `omega[j]` is the weight of input `j`, `alpha[t]` for `t = 0..=T`, and
/// `beta` lists `(j, β_j)` over the marked inputs. `β` only enters the
/// analysis, never the instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub omega: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Option<Vec<(usize, f64)>>,
    pub regime: Regime,
    pub mu: Option<f64>,
    pub k: Option<f64>,
}

impl Weights {
    pub fn validate(&self, n: usize, steps: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidWeights(m));
        if self.omega.len() != n {
            return bad(format!("{} weights ω for {n} inputs", self.omega.len()));
        }
        if self.omega.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return bad("ω must be positive and finite".into());
        }
        if self.alpha.len() != steps + 1 {
            return bad(format!("{} weights α for steps 0..={steps}", self.alpha.len()));
        }
        if self.alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return bad("α must be positive and finite".into());
        }
        if self.alpha[0] != 1.0 {
            return bad(format!("α₀ must be 1, got {}", self.alpha[0]));
        }
        if let Some(beta) = &self.beta {
            beta_sum_residual(beta).and_then(|r| if r > 1e-12 { bad(format!("Σ√β differs from 1 by {r:e}")) } else { Ok(()) })?;
            if let Some(&(j, _)) = beta.iter().find(|(j, _)| *j >= n) {
                return Err(Error::OutOfRange { index: j, len: n });
            }
        }
        Ok(())
    }
}

/// `|Σ √β_j − 1|`, rejecting negative entries.
pub fn beta_sum_residual(beta: &[(usize, f64)]) -> Result<f64> {
    if beta.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    if beta.iter().any(|(_, b)| !(b.is_finite() && *b > 0.0)) {
        return Err(Error::InvalidWeights("β must be positive".into()));
    }
    Ok((beta.iter().map(|(_, b)| b.sqrt()).sum::<f64>() - 1.0).abs())
}

/// What a regime may read. `moments[j]` are the stopping-time moments of
/// input `j`; only the known-cost regimes read them into `ω`.
#[derive(Debug, Clone, Copy)]
pub struct RegimeInputs<'a> {
    pub n: usize,
    pub steps: usize,
    pub moments: &'a [Moments],
    pub marked: &'a [usize],
    /// Promise `μ = min |M_f|`; defaults to `|M_f|` when the set is nonempty.
    pub mu: Option<f64>,
    /// Promise scalar `k`; defaults to `S_f` for the current marked set.
    pub k: Option<f64>,
}

fn log2_floor1(steps: usize) -> f64 {
    (steps as f64).log2().max(1.0)
}

/// `β_j = (g_j / Σ_{M} g)²`, so `Σ √β = 1` whatever the promise `k` is.
fn normalized_beta(marked: &[usize], g: impl Fn(usize) -> f64) -> (Vec<(usize, f64)>, f64) {
    let s: f64 = marked.iter().map(|&j| g(j)).sum();
    (marked.iter().map(|&j| (j, (g(j) / s).powi(2))).collect(), s)
}

pub fn regime_parameters(regime: Regime, inputs: &RegimeInputs) -> Result<Weights> {
    let RegimeInputs { n, steps, moments, marked, mu, k } = *inputs;
    let nf = n as f64;
    if n == 0 {
        return Err(Error::InvalidWeights("no inputs".into()));
    }
    if let Some(&j) = marked.iter().find(|&&j| j >= n) {
        return Err(Error::OutOfRange { index: j, len: n });
    }
    let needs_moments = !matches!(regime, Regime::Simple | Regime::Custom);
    if needs_moments {
        if moments.len() != n {
            return Err(Error::InvalidProfile(format!("{} moment records for {n} inputs", moments.len())));
        }
        if moments.iter().any(|m| !(m.mean > 0.0 && m.second > 0.0)) {
            return Err(Error::InvalidProfile("moments must be positive".into()));
        }
    }
    let mu_value = || -> Result<f64> {
        let v = match (mu, marked.len()) {
            (Some(m), _) => m,
            (None, 0) => return Err(Error::MissingPromise("μ".into())),
            (None, m) => m as f64,
        };
        if !(v >= 1.0) {
            return Err(Error::MissingPromise(format!("μ must be at least 1, got {v}")));
        }
        Ok(v)
    };
    let uniform_beta = || (!marked.is_empty()).then(|| marked.iter().map(|&j| (j, 1.0 / (marked.len() as f64).powi(2))).collect());
    let k_value = |g: &dyn Fn(usize) -> f64| -> Result<(f64, Option<Vec<(usize, f64)>>)> {
        let (beta, s) = if marked.is_empty() { (None, None) } else {
            let (b, s) = normalized_beta(marked, g);
            (Some(b), Some(s))
        };
        let kv = k.or(s).ok_or_else(|| Error::MissingPromise("k".into()))?;
        if !(kv > 0.0 && kv.is_finite()) {
            return Err(Error::MissingPromise(format!("k must be positive, got {kv}")));
        }
        Ok((kv, beta))
    };
    let alpha: Vec<f64> = (0..=steps).map(|t| regime.alpha(t)).collect();

    let (omega, beta, mu_out, k_out) = match regime {
        Regime::Simple | Regime::Custom => {
            let m = mu_value()?;
            (vec![nf / m; n], uniform_beta(), Some(m), None)
        }
        Regime::IA => {
            let m = mu_value()?;
            (moments.iter().map(|x| nf / m * x.mean).collect(), uniform_beta(), Some(m), None)
        }
        Regime::IB => {
            let (kv, beta) = k_value(&|j| 1.0 / moments[j].mean.powi(2))?;
            (moments.iter().map(|x| nf / (kv * x.mean)).collect(), beta, None, Some(kv))
        }
        Regime::IIA => {
            let m = mu_value()?;
            (vec![nf * log2_floor1(steps) / m; n], uniform_beta(), Some(m), None)
        }
        Regime::IIB => {
            let (kv, beta) = k_value(&|j| 1.0 / moments[j].mean)?;
            (vec![nf / kv; n], beta, None, Some(kv))
        }
        Regime::IIC => {
            let (kv, beta) = k_value(&|j| 1.0 / moments[j].second)?;
            (vec![nf / kv; n], beta, None, Some(kv))
        }
    };
    let w = Weights { omega, alpha, beta, regime, mu: mu_out, k: k_out };
    w.validate(n, steps)?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(mean: f64) -> Moments {
        Moments { mean, second: mean * mean, log_mean: mean.ln() }
    }

    #[test]
    fn known_cost_weights() {
        let ms = vec![m(1.0); 4];
        let inputs = RegimeInputs { n: 4, steps: 2, moments: &ms, marked: &[], mu: Some(1.0), k: None };
        let w = regime_parameters(Regime::IA, &inputs).unwrap();
        assert_eq!(w.omega, vec![4.0; 4]);
        assert!(w.beta.is_none());
    }

    #[test]
    fn unknown_cost_log_weights() {
        let ms = vec![m(1.0); 8];
        let inputs = RegimeInputs { n: 8, steps: 16, moments: &ms, marked: &[], mu: Some(2.0), k: None };
        let w = regime_parameters(Regime::IIA, &inputs).unwrap();
        assert_eq!(w.omega[0], 8.0 * 4.0 / 2.0);
        assert_eq!(w.alpha, (1..=17).map(f64::from).collect::<Vec<_>>());
    }

    #[test]
    fn inverse_cost_beta() {
        let ms = vec![m(1.0), m(1.0), m(3.0)];
        let inputs = RegimeInputs { n: 3, steps: 3, moments: &ms, marked: &[1, 2], mu: None, k: None };
        let w = regime_parameters(Regime::IIB, &inputs).unwrap();
        assert!((w.k.unwrap() - 4.0 / 3.0).abs() < 1e-15);
        let beta = w.beta.unwrap();
        assert!((beta[0].1 - 0.5625).abs() < 1e-15 && (beta[1].1 - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn missing_promise() {
        let ms = vec![m(1.0); 2];
        let inputs = RegimeInputs { n: 2, steps: 1, moments: &ms, marked: &[], mu: None, k: None };
        for r in Regime::GENERAL {
            assert!(matches!(regime_parameters(r, &inputs), Err(Error::MissingPromise(_))), "{}", r.name());
        }
    }
}
