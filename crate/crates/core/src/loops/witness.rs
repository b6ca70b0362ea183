use serde::{Deserialize, Serialize};

use super::instance::PEInstance;
use crate::error::{Error, Result};
use crate::linalg::{CVector, TolerancePolicy, C64};
use crate::textfmt::{fmt_f64, parse_token, TextDoc};

/// A witness together with the squared norm its closed form predicts
/// (`‖w₊‖²` or `‖w_A‖²`).
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Positive { w: CVector, predicted_norm_sq: f64 },
    Negative { w_a: CVector, w_b: CVector, predicted_norm_sq: f64 },
}

impl Witness {
    pub fn is_positive(&self) -> bool {
        matches!(self, Witness::Positive { .. })
    }

    pub fn predicted_norm_sq(&self) -> f64 {
        match self {
            Witness::Positive { predicted_norm_sq, .. } | Witness::Negative { predicted_norm_sq, .. } => *predicted_norm_sq,
        }
    }

    pub fn to_text(&self) -> String {
        let mut d = TextDoc::default();
        d.push_header("kind", ["witness"]);
        let vectors: Vec<(&str, &CVector)> = match self {
            Witness::Positive { w, .. } => vec![("w_plus", w)],
            Witness::Negative { w_a, w_b, .. } => vec![("w_a", w_a), ("w_b", w_b)],
        };
        d.push_header("sign", [if self.is_positive() { "positive" } else { "negative" }]);
        d.push_header("dim", [vectors[0].1.len()]);
        d.push_header("predicted_norm_sq", [fmt_f64(self.predicted_norm_sq())]);
        for (name, v) in vectors {
            let row = v.iter().enumerate().filter(|(_, x)| **x != C64::new(0.0, 0.0)).flat_map(|(k, x)| [k.to_string(), fmt_f64(x.re), fmt_f64(x.im)]);
            d.push_section("vector", vec![name.to_string()]).rows.push(row.collect());
        }
        d.render()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let d = TextDoc::parse(text)?;
        if d.header_one::<String>("kind")? != "witness" {
            return Err(Error::Parse { line: 0, msg: "not a witness document".into() });
        }
        let dim: usize = d.header_one("dim")?;
        let predicted_norm_sq: f64 = d.header_one("predicted_norm_sq")?;
        let vector = |name: &str| -> Result<CVector> {
            let s = d
                .sections
                .iter()
                .find(|s| s.name == "vector" && s.args.first().map(String::as_str) == Some(name))
                .ok_or_else(|| Error::Parse { line: 0, msg: format!("missing vector {name}") })?;
            let mut v = CVector::zeros(dim);
            let row = s.rows.first().map(Vec::as_slice).unwrap_or(&[]);
            if row.len() % 3 != 0 {
                return Err(Error::Parse { line: 0, msg: "vector rows are `index re im` triples".into() });
            }
            for c in row.chunks(3) {
                let k: usize = parse_token(&c[0])?;
                if k >= dim {
                    return Err(Error::OutOfRange { index: k, len: dim });
                }
                v[k] = C64::new(parse_token(&c[1])?, parse_token(&c[2])?);
            }
            Ok(v)
        };
        match d.header_one::<String>("sign")?.as_str() {
            "positive" => Ok(Witness::Positive { w: vector("w_plus")?, predicted_norm_sq }),
            "negative" => Ok(Witness::Negative { w_a: vector("w_a")?, w_b: vector("w_b")?, predicted_norm_sq }),
            other => Err(Error::Parse { line: 0, msg: format!("unknown witness sign `{other}`") }),
        }
    }
}

/// Numerical audit of a witness against an instance.
///
/// For a positive witness the residuals are `‖Π_A w₊‖` and `‖Π_B w₊‖`; for a
/// negative one `‖(I − Π_A) w_A‖` and `‖(I − Π_B) w_B‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub positive: bool,
    pub residual_a: f64,
    pub residual_b: f64,
    /// `‖w_A + w_B − ψ₀‖`; absent for positive witnesses.
    pub decomposition_residual: Option<f64>,
    /// `⟨w₊|ψ₀⟩` as `[re, im]`; absent for negative witnesses.
    pub overlap: Option<[f64; 2]>,
    pub norm_sq: f64,
    pub predicted_norm_sq: f64,
    /// `|‖w‖² − predicted| / max(1, predicted)`
    pub norm_residual: f64,
    /// `‖w₊‖² / |⟨w₊|ψ₀⟩|²`
    pub c_plus_effective: Option<f64>,
    /// `‖w_A‖²`
    pub c_minus_effective: Option<f64>,
    pub passed: bool,
}

pub fn verify_witnesses(instance: &PEInstance, witness: &Witness, tol: &TolerancePolicy) -> Result<WitnessReport> {
    let psi0 = instance.psi0_full();
    let predicted = witness.predicted_norm_sq();
    let rel = |norm_sq: f64| (norm_sq - predicted).abs() / predicted.max(1.0);
    let report = match witness {
        Witness::Positive { w, .. } => {
            let (inner, _) = instance.compress(w)?;
            let residual_a = instance.pa().apply(&inner).norm();
            let residual_b = instance.pb().apply(&inner).norm();
            let ov = w.dotc(&psi0);
            let norm_sq = w.norm_squared();
            let c_plus = norm_sq / ov.norm_sqr();
            let passed = residual_a <= tol.assert_tol && residual_b <= tol.assert_tol && ov.norm() > tol.assert_tol && rel(norm_sq) <= tol.assert_tol;
            WitnessReport {
                positive: true,
                residual_a,
                residual_b,
                decomposition_residual: None,
                overlap: Some([ov.re, ov.im]),
                norm_sq,
                predicted_norm_sq: predicted,
                norm_residual: rel(norm_sq),
                c_plus_effective: Some(c_plus),
                c_minus_effective: None,
                passed,
            }
        }
        Witness::Negative { w_a, w_b, .. } => {
            let outside_residual = |v: &CVector, p: &crate::linalg::Projector| -> Result<f64> {
                let (inner, outside) = instance.compress(v)?;
                Ok((p.complement(&inner).norm_squared() + outside * outside).sqrt())
            };
            let residual_a = outside_residual(w_a, instance.pa())?;
            let residual_b = outside_residual(w_b, instance.pb())?;
            let decomposition = (w_a + w_b - &psi0).norm();
            let norm_sq = w_a.norm_squared();
            let passed = residual_a <= tol.assert_tol
                && residual_b <= tol.assert_tol
                && decomposition <= tol.assert_tol
                && rel(norm_sq) <= tol.assert_tol;
            WitnessReport {
                positive: false,
                residual_a,
                residual_b,
                decomposition_residual: Some(decomposition),
                overlap: None,
                norm_sq,
                predicted_norm_sq: predicted,
                norm_residual: rel(norm_sq),
                c_plus_effective: None,
                c_minus_effective: Some(norm_sq),
                passed,
            }
        }
    };
    Ok(report)
}
