//! Experiment configuration.
//!
//! Configurations are TOML documents with a few top-level keys and one
//! optional table per experiment family; every field has a default except
//! `kind`. The schema is documented in `docs/config.md`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vtslab_core::linalg::DIM_CAP;
use vtslab_core::loops::{GeneralSpace, Regime};
use vtslab_core::TolerancePolicy;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    GroverWeights,
    SimpleLoop,
    GeneralLoop,
    BoundsCompare,
    FullSuite,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::GroverWeights => "grover-weights",
            Kind::SimpleLoop => "simple-loop",
            Kind::GeneralLoop => "general-loop",
            Kind::BoundsCompare => "bounds-compare",
            Kind::FullSuite => "full-suite",
        }
    }

    /// The single-family kinds a run of this kind consists of.
    pub fn parts(self) -> Vec<Kind> {
        match self {
            Kind::FullSuite => vec![Kind::GroverWeights, Kind::SimpleLoop, Kind::GeneralLoop, Kind::BoundsCompare],
            k => vec![k],
        }
    }

    fn randomized(self) -> bool {
        !matches!(self, Kind::SimpleLoop)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(HarnessError::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Overrides of the default [`TolerancePolicy`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub rank_tol: Option<f64>,
    pub assert_tol: Option<f64>,
    pub eig_cluster_tol: Option<f64>,
}

impl ToleranceOverrides {
    pub fn policy(&self) -> Result<TolerancePolicy> {
        let d = TolerancePolicy::default();
        Ok(TolerancePolicy::new(
            self.rank_tol.unwrap_or(d.rank_tol),
            self.assert_tol.unwrap_or(d.assert_tol),
            self.eig_cluster_tol.unwrap_or(d.eig_cluster_tol),
        )?)
    }
}

/// Grover's loop: weights, closed forms, and average query cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroverConfig {
    pub n: Vec<usize>,
    /// The unique marked element.
    pub marked: usize,
    /// Random cost profiles for the average-cost check.
    pub profiles: usize,
    pub profile_n: Vec<usize>,
    /// Expected costs are drawn from `[1, max_cost]`.
    pub max_cost: f64,
}

impl Default for GroverConfig {
    fn default() -> Self {
        Self { n: vec![4, 16, 64], marked: 0, profiles: 100, profile_n: vec![16, 64], max_cost: 1000.0 }
    }
}

/// The simple loop over a unit-cost oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimpleConfig {
    pub n: Vec<usize>,
    pub marked_sets: Vec<Vec<usize>>,
    /// `μ`; defaults to the smallest nonempty marked set in the sweep.
    pub mu: Option<f64>,
}

impl Default for SimpleConfig {
    fn default() -> Self {
        Self { n: vec![4, 16], marked_sets: vec![vec![], vec![1]], mu: None }
    }
}

impl SimpleConfig {
    pub fn mu(&self) -> f64 {
        self.mu.unwrap_or_else(|| self.marked_sets.iter().filter(|m| !m.is_empty()).map(|m| m.len()).min().unwrap_or(1) as f64)
    }
}

/// Loop composition with random zero-error subroutines. Each instance draws
/// its sizes from the three lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneralConfig {
    pub n: Vec<usize>,
    pub steps: Vec<usize>,
    pub workspace: Vec<usize>,
    pub regimes: Vec<Regime>,
    pub instances: usize,
    /// Real orthogonal steps instead of complex unitary ones.
    pub real: bool,
    /// Run simulated phase estimation alongside the spectral decision.
    pub qpe: bool,
}

impl Default for GeneralConfig {
    fn default() -> Self {
        Self {
            n: vec![1, 2, 3, 4],
            steps: vec![1, 2, 3, 4],
            workspace: vec![1, 2, 3, 4],
            regimes: Regime::GENERAL.to_vec(),
            instances: 50,
            real: false,
            qpe: true,
        }
    }
}

/// Cost-bound comparison on random unique-marked profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub n: Vec<usize>,
    pub profiles: usize,
    /// Stopping times are supported on `1..=t_max`, with `t_max` drawn per profile.
    pub t_max: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self { n: vec![8, 64], profiles: 100, t_max: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: Option<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub tolerance: ToleranceOverrides,
    #[serde(default)]
    pub grover: GroverConfig,
    #[serde(default)]
    pub simple: SimpleConfig,
    #[serde(default)]
    pub general: GeneralConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("vtslab-out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(HarnessError::Config(msg()))
    }
}

impl ExperimentConfig {
    pub fn new(kind: Kind, seed: Option<u64>) -> Self {
        Self {
            kind,
            seed,
            output_dir: default_output_dir(),
            formats: default_formats(),
            tolerance: ToleranceOverrides::default(),
            grover: GroverConfig::default(),
            simple: SimpleConfig::default(),
            general: GeneralConfig::default(),
            bounds: BoundsConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn tolerance(&self) -> Result<TolerancePolicy> {
        self.tolerance.policy()
    }

    /// SHA-256 of the canonical JSON form, with the output location and
    /// formats left out so that the same experiment written to two places
    /// has one digest.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        c.formats.clear();
        let json = serde_json::to_string(&c).expect("configs serialize");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| HarnessError::Config(format!("{} needs a seed", self.kind.name())))
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerance()?;
        check(!self.formats.is_empty(), || "no output formats".into())?;
        let parts = self.kind.parts();
        if parts.iter().any(|k| k.randomized()) {
            self.seed()?;
        }
        for k in parts {
            match k {
                Kind::GroverWeights => self.validate_grover()?,
                Kind::SimpleLoop => self.validate_simple()?,
                Kind::GeneralLoop => self.validate_general()?,
                Kind::BoundsCompare => self.validate_bounds()?,
                Kind::FullSuite => unreachable!("parts are single families"),
            }
        }
        Ok(())
    }

    fn validate_grover(&self) -> Result<()> {
        let g = &self.grover;
        check(!g.n.is_empty(), || "grover.n is empty".into())?;
        for &n in g.n.iter().chain(&g.profile_n) {
            check((2..=DIM_CAP).contains(&n), || format!("grover size {n} outside 2..={DIM_CAP}"))?;
            check(g.marked < n, || format!("grover.marked = {} is not below N = {n}", g.marked))?;
        }
        check(g.profiles == 0 || !g.profile_n.is_empty(), || "grover.profile_n is empty".into())?;
        check(g.max_cost.is_finite() && g.max_cost >= 1.0, || "grover.max_cost must be at least 1".into())
    }

    fn validate_simple(&self) -> Result<()> {
        let s = &self.simple;
        check(!s.n.is_empty() && !s.marked_sets.is_empty(), || "simple.n and simple.marked_sets must be nonempty".into())?;
        for &n in &s.n {
            check(n >= 2 && 8 * n <= DIM_CAP, || format!("simple size {n} outside 2..={}", DIM_CAP / 8))?;
            for m in &s.marked_sets {
                check(m.iter().all(|&i| i < n), || format!("marked set {m:?} does not fit N = {n}"))?;
            }
        }
        check(s.mu() >= 1.0, || "simple.mu must be at least 1".into())
    }

    fn validate_general(&self) -> Result<()> {
        let g = &self.general;
        for (name, list) in [("n", &g.n), ("steps", &g.steps), ("workspace", &g.workspace)] {
            check(!list.is_empty() && !list.contains(&0), || format!("general.{name} needs positive entries"))?;
        }
        check(!g.regimes.is_empty(), || "general.regimes is empty".into())?;
        check(g.regimes.iter().all(|r| Regime::GENERAL.contains(r)), || "general.regimes accepts i-a, i-b, ii-a, ii-b, ii-c".into())?;
        let space = GeneralSpace {
            n: *g.n.iter().max().unwrap(),
            workspace: *g.workspace.iter().max().unwrap(),
            steps: *g.steps.iter().max().unwrap(),
        };
        check(space.dim() <= DIM_CAP, || format!("largest general instance has dimension {} > {DIM_CAP}", space.dim()))
    }

    fn validate_bounds(&self) -> Result<()> {
        let b = &self.bounds;
        check(!b.n.is_empty() && !b.n.contains(&0), || "bounds.n needs positive entries".into())?;
        check(b.t_max >= 1, || "bounds.t_max must be at least 1".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip_keeps_digest() {
        let mut c = ExperimentConfig::new(Kind::FullSuite, Some(7));
        c.general.instances = 3;
        c.simple.marked_sets = vec![vec![], vec![0, 2]];
        let text = c.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.digest(), c.digest());
        let mut moved = c.clone();
        moved.output_dir = PathBuf::from("elsewhere");
        assert_eq!(moved.digest(), c.digest());
        moved.seed = Some(8);
        assert_ne!(moved.digest(), c.digest());
    }

    #[test]
    fn minimal_document() {
        let c = ExperimentConfig::from_toml("kind = \"simple-loop\"\n[simple]\nn = [4]\n").unwrap();
        assert_eq!(c.simple.n, vec![4]);
        assert_eq!(c.simple.marked_sets, SimpleConfig::default().marked_sets);
    }

    #[test]
    fn rejections() {
        let bad = [
            "kind = \"bounds-compare\"\n",
            "kind = \"grover-weights\"\nseed = 1\n[grover]\nn = [1]\n",
            "kind = \"simple-loop\"\n[simple]\nn = [4]\nmarked_sets = [[5]]\n",
            "kind = \"general-loop\"\nseed = 1\n[general]\nn = [40]\nsteps = [8]\nworkspace = [8]\n",
            "kind = \"general-loop\"\nseed = 1\n[general]\nregimes = [\"simple\"]\n",
            "kind = \"simple-loop\"\n[tolerance]\nrank_tol = 1e-3\n",
            "kind = \"simple-loop\"\nunknown = 1\n",
            "kind = \"sideways\"\n",
        ];
        for text in bad {
            assert!(ExperimentConfig::from_toml(text).is_err(), "{text}");
        }
    }
}
