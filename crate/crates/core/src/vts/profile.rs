use serde::{Deserialize, Serialize};

use super::SubroutineSpec;
use crate::error::{Error, Result};

/// Exact distribution of the stopping time `T_i`, indexed by `t = 0..=T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingProfile {
    pub pmf: Vec<f64>,
    pub cdf: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub second: f64,
    /// `E[ln T]`, with `ln 0` read as 0.
    pub log_mean: f64,
}

impl StoppingProfile {
    pub fn from_pmf(pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() || pmf.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::InvalidProfile("pmf entries must be finite and nonnegative".into()));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidProfile(format!("pmf sums to {total}")));
        }
        let cdf = pmf
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(Self { pmf, cdf })
    }

    pub fn point_mass(t: usize, steps: usize) -> Self {
        let mut pmf = vec![0.0; steps.max(t) + 1];
        pmf[t] = 1.0;
        Self::from_pmf(pmf).expect("point mass is a distribution")
    }

    pub fn steps(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn expect(&self, g: impl Fn(usize) -> f64) -> f64 {
        self.pmf.iter().enumerate().map(|(t, p)| p * g(t)).sum()
    }

    /// `E[Σ_{s=0}^{T_i} g(s)]`
    pub fn expect_cumulative(&self, g: impl Fn(usize) -> f64) -> f64 {
        let mut running = 0.0;
        let mut total = 0.0;
        for (t, p) in self.pmf.iter().enumerate() {
            running += g(t);
            total += p * running;
        }
        total
    }

    /// `Pr[T_i ≥ t]`
    pub fn survival(&self, t: usize) -> f64 {
        if t == 0 {
            return 1.0;
        }
        1.0 - self.cdf.get(t - 1).copied().unwrap_or(1.0)
    }
}

/// `cdf(t) = ‖Π_{≤t} U_t ⋯ U_1 |0,0⟩‖²`, computed from the exact trajectory.
pub fn stopping_profile(spec: &SubroutineSpec, i: usize) -> Result<StoppingProfile> {
    let traj = spec.trajectory(i)?;
    let cdf: Vec<f64> = traj.iter().enumerate().map(|(t, phi)| spec.project_halted(phi, t).norm_squared()).collect();
    let pmf = cdf.iter().enumerate().map(|(t, &c)| if t == 0 { c } else { c - cdf[t - 1] }).collect();
    Ok(StoppingProfile { pmf, cdf })
}

pub fn profile_moments(p: &StoppingProfile) -> Moments {
    Moments {
        mean: p.expect(|t| t as f64),
        second: p.expect(|t| (t * t) as f64),
        log_mean: p.expect(|t| if t == 0 { 0.0 } else { (t as f64).ln() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_small_profiles() {
        let m = profile_moments(&StoppingProfile::point_mass(2, 3));
        assert_eq!((m.mean, m.second), (2.0, 4.0));
        assert!((m.log_mean - 2f64.ln()).abs() < 1e-15);
        let p = StoppingProfile::from_pmf(vec![0.0, 0.5, 0.0, 0.5]).unwrap();
        let m = profile_moments(&p);
        assert_eq!((m.mean, m.second), (2.0, 5.0));
        assert!((m.log_mean - 3f64.ln() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn cumulative_and_survival_agree() {
        let p = StoppingProfile::from_pmf(vec![0.0, 0.25, 0.25, 0.5]).unwrap();
        let via_cumulative = p.expect_cumulative(|t| (t + 1) as f64);
        let via_survival: f64 = (0..=3).map(|t| (t + 1) as f64 * p.survival(t)).sum();
        assert!((via_cumulative - via_survival).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_pmf() {
        assert!(StoppingProfile::from_pmf(vec![0.5, 0.2]).is_err());
        assert!(StoppingProfile::from_pmf(vec![]).is_err());
    }
}
