use serde::{Deserialize, Serialize};

use super::labels::{GeneralSpace, SimpleSpace, Tag};
use super::regime::{Regime, Weights};
use crate::error::{Error, Result};
use crate::linalg::{adjoint_mul, check_dim, columns_to_matrix, orthonormalize, reflection, CMatrix, CVector, Projector, TolerancePolicy, C64};
use crate::textfmt::{fmt_f64, parse_token, TextDoc};
use crate::vts::SubroutineSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::A => "A",
            Side::B => "B",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Simple,
    General,
}

/// Sorted `(index, value)` pairs with no repeated index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, C64)>,
}

impl SparseVector {
    /// Sums repeated indices and drops exact zeros.
    pub fn new(mut entries: Vec<(usize, C64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, C64)> = Vec::with_capacity(entries.len());
        for (k, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == k => last.1 += v,
                _ => merged.push((k, v)),
            }
        }
        merged.retain(|e| e.1 != C64::new(0.0, 0.0));
        Self { entries: merged }
    }

    pub fn real(entries: impl IntoIterator<Item = (usize, f64)>) -> Self {
        Self::new(entries.into_iter().map(|(k, v)| (k, C64::new(v, 0.0))).collect())
    }

    pub fn entries(&self) -> &[(usize, C64)] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    pub fn to_dense(&self, dim: usize) -> CVector {
        let mut v = CVector::zeros(dim);
        for &(k, x) in &self.entries {
            v[k] = x;
        }
        v
    }

    fn to_row(&self) -> Vec<String> {
        self.entries.iter().flat_map(|(k, v)| [k.to_string(), fmt_f64(v.re), fmt_f64(v.im)]).collect()
    }

    fn from_row(row: &[String]) -> Result<Self> {
        if row.len() % 3 != 0 {
            return Err(Error::Parse { line: 0, msg: "sparse rows are `index re im` triples".into() });
        }
        let entries = row
            .chunks(3)
            .map(|c| Ok((parse_token(&c[0])?, C64::new(parse_token(&c[1])?, parse_token(&c[2])?))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(entries))
    }
}

/// One named family of generators, e.g. `bullet` or `even`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorGroup {
    pub name: String,
    pub side: Side,
    pub vectors: Vec<SparseVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Simple(SimpleSpace),
    General(GeneralSpace),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Simple(s) => s.dim(),
            Space::General(g) => g.dim(),
        }
    }

    pub fn variant(&self) -> Variant {
        match self {
            Space::Simple(_) => Variant::Simple,
            Space::General(_) => Variant::General,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Space::Simple(s) => s.n,
            Space::General(g) => g.n,
        }
    }

    pub fn tags(&self) -> &'static [Tag] {
        match self {
            Space::Simple(_) => &Tag::SIMPLE,
            Space::General(_) => &Tag::GENERAL,
        }
    }

    /// Tag is the most significant digit of every index.
    pub fn tag_of(&self, k: usize) -> Tag {
        let tags = self.tags();
        tags[k / (self.dim() / tags.len())]
    }
}

/// Orthogonality and normalization defects of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellFormedness {
    /// Largest `|⟨g, h⟩| / (‖g‖ ‖h‖)` over distinct generators of `Ψ_A`.
    pub gram_a: f64,
    pub gram_b: f64,
    /// Largest `|⟨ψ₀, g⟩| / ‖g‖` over `g ∈ Ψ_B`.
    pub psi0_b: f64,
    /// `|‖ψ₀‖ − 1|`
    pub psi0_norm: f64,
}

impl WellFormedness {
    pub fn max(&self) -> f64 {
        self.gram_a.max(self.gram_b).max(self.psi0_b).max(self.psi0_norm)
    }
}

/// A phase-estimation instance `(H, ψ₀, Ψ_A, Ψ_B)`.
///
/// Coordinates outside the union of the supports of `ψ₀` and all generators
/// lie in the kernel of both projectors, where `U_AB` is the identity. The
/// projectors and `U_AB` are therefore stored on the *active* coordinates only;
/// [`PEInstance::compress`] and [`PEInstance::expand`] move vectors between the
/// two spaces.
#[derive(Debug, Clone)]
pub struct PEInstance {
    space: Space,
    psi0: SparseVector,
    groups: Vec<GeneratorGroup>,
    weights: Weights,
    marked: Vec<usize>,
    active: Vec<usize>,
    position: Vec<Option<usize>>,
    pa: Projector,
    pb: Projector,
    source: Option<SubroutineSpec>,
    tol: TolerancePolicy,
}

impl PEInstance {
    pub fn from_groups(
        space: Space,
        psi0: SparseVector,
        groups: Vec<GeneratorGroup>,
        weights: Weights,
        marked: Vec<usize>,
        tol: &TolerancePolicy,
    ) -> Result<Self> {
        tol.validate()?;
        let dim = space.dim();
        check_dim(dim)?;
        let in_range = |v: &SparseVector| v.entries.iter().find(|e| e.0 >= dim).map(|e| e.0);
        if let Some(k) = std::iter::once(&psi0).chain(groups.iter().flat_map(|g| &g.vectors)).find_map(in_range) {
            return Err(Error::OutOfRange { index: k, len: dim });
        }
        let mut used = vec![false; dim];
        for v in std::iter::once(&psi0).chain(groups.iter().flat_map(|g| &g.vectors)) {
            for &(k, _) in &v.entries {
                used[k] = true;
            }
        }
        let active: Vec<usize> = (0..dim).filter(|&k| used[k]).collect();
        let mut position = vec![None; dim];
        for (p, &k) in active.iter().enumerate() {
            position[k] = Some(p);
        }
        let mut inst = Self {
            space,
            psi0,
            groups,
            weights,
            marked,
            active,
            position,
            pa: Projector::zero(0),
            pb: Projector::zero(0),
            source: None,
            tol: *tol,
        };
        let n = inst.active.len();
        inst.pa = Projector::from_orthonormal(n, &orthonormalize(&inst.generators(Side::A), tol)?);
        inst.pb = Projector::from_orthonormal(n, &orthonormalize(&inst.generators(Side::B), tol)?);
        Ok(inst)
    }

    pub(crate) fn with_source(mut self, spec: SubroutineSpec) -> Self {
        self.source = Some(spec);
        self
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn variant(&self) -> Variant {
        self.space.variant()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn active_dim(&self) -> usize {
        self.active.len()
    }

    pub fn groups(&self) -> &[GeneratorGroup] {
        &self.groups
    }

    pub fn group(&self, name: &str) -> Option<&GeneratorGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    /// Inputs `j` (0-based) with `f(j) = 1`.
    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    /// The subroutine a general instance was built from; absent after parsing.
    pub fn source(&self) -> Option<&SubroutineSpec> {
        self.source.as_ref()
    }

    pub fn tolerance(&self) -> &TolerancePolicy {
        &self.tol
    }

    /// Projector onto `span(Ψ_A)`, on the active coordinates.
    pub fn pa(&self) -> &Projector {
        &self.pa
    }

    pub fn pb(&self) -> &Projector {
        &self.pb
    }

    pub fn psi0_sparse(&self) -> &SparseVector {
        &self.psi0
    }

    /// `ψ₀` on the active coordinates.
    pub fn psi0(&self) -> CVector {
        self.compress_sparse(&self.psi0)
    }

    pub fn psi0_full(&self) -> CVector {
        self.psi0.to_dense(self.dim())
    }

    fn compress_sparse(&self, v: &SparseVector) -> CVector {
        let mut out = CVector::zeros(self.active.len());
        for &(k, x) in &v.entries {
            out[self.position[k].expect("generator support is active")] = x;
        }
        out
    }

    /// Active part of a full-space vector, and the norm of what was dropped.
    pub fn compress(&self, v: &CVector) -> Result<(CVector, f64)> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        let inner = CVector::from_iterator(self.active.len(), self.active.iter().map(|&k| v[k]));
        let outside = v.iter().zip(&self.position).filter(|(_, p)| p.is_none()).map(|(x, _)| x.norm_sqr()).sum::<f64>().sqrt();
        Ok((inner, outside))
    }

    pub fn expand(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.active.len() {
            return Err(Error::DimensionMismatch { expected: self.active.len(), found: v.len() });
        }
        let mut out = CVector::zeros(self.dim());
        for (p, &k) in self.active.iter().enumerate() {
            out[k] = v[p];
        }
        Ok(out)
    }

    /// Generators of one side, on the active coordinates.
    pub fn generators(&self, side: Side) -> Vec<CVector> {
        self.groups.iter().filter(|g| g.side == side).flat_map(|g| &g.vectors).map(|v| self.compress_sparse(v)).collect()
    }

    pub fn group_generators(&self, name: &str) -> Vec<CVector> {
        self.group(name).map(|g| g.vectors.iter().map(|v| self.compress_sparse(v)).collect()).unwrap_or_default()
    }

    /// `U_AB = (2Π_A − I)(2Π_B − I)` on the active coordinates.
    pub fn u_ab(&self) -> CMatrix {
        self.pa.reflect_matrix(&reflection(&self.pb))
    }

    pub fn well_formedness(&self) -> WellFormedness {
        let gram = |side| {
            let cols: Vec<CVector> = self.generators(side).into_iter().filter(|v| v.norm() > 0.0).map(|v| v.normalize()).collect();
            if cols.len() < 2 {
                return 0.0;
            }
            let g = columns_to_matrix(self.active.len(), &cols);
            let gram = adjoint_mul(&g, &g);
            let mut worst: f64 = 0.0;
            for r in 0..gram.nrows() {
                for c in 0..gram.ncols() {
                    if r != c {
                        worst = worst.max(gram[(r, c)].norm());
                    }
                }
            }
            worst
        };
        let psi0 = self.psi0();
        let psi0_b = self
            .generators(Side::B)
            .iter()
            .filter(|v| v.norm() > 0.0)
            .map(|v| psi0.dotc(v).norm() / v.norm())
            .fold(0.0, f64::max);
        WellFormedness { gram_a: gram(Side::A), gram_b: gram(Side::B), psi0_b, psi0_norm: (psi0.norm() - 1.0).abs() }
    }

    /// Tags whose coordinates are never touched by `ψ₀` or any generator.
    pub fn unused_tags(&self) -> Vec<Tag> {
        self.space.tags().iter().copied().filter(|&t| !self.active.iter().any(|&k| self.space.tag_of(k) == t)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut d = TextDoc::default();
        d.push_header("kind", ["instance"]);
        match self.space {
            Space::Simple(s) => d.push_header("variant", ["simple".to_string(), s.n.to_string()]),
            Space::General(g) => {
                d.push_header("variant", ["general".to_string(), g.n.to_string(), g.workspace.to_string(), g.steps.to_string()])
            }
        }
        d.push_header("marked", self.marked.iter());
        let w = &self.weights;
        d.push_header("regime", [w.regime.name()]);
        d.push_header("omega", w.omega.iter().map(|&x| fmt_f64(x)));
        d.push_header("alpha", w.alpha.iter().map(|&x| fmt_f64(x)));
        if let Some(beta) = &w.beta {
            d.push_header("beta", beta.iter().flat_map(|&(j, b)| [j.to_string(), fmt_f64(b)]));
        }
        if let Some(mu) = w.mu {
            d.push_header("mu", [fmt_f64(mu)]);
        }
        if let Some(k) = w.k {
            d.push_header("k", [fmt_f64(k)]);
        }
        d.push_section("psi0", Vec::new()).rows.push(self.psi0.to_row());
        for g in &self.groups {
            let s = d.push_section("generators", vec![g.side.name().to_string(), g.name.clone()]);
            s.rows.extend(g.vectors.iter().map(SparseVector::to_row));
        }
        let mut text = String::from("# loop instance; sparse rows are `index re im` triples\n");
        text.push_str(&d.render());
        text
    }

    pub fn from_text(text: &str, tol: &TolerancePolicy) -> Result<Self> {
        let d = TextDoc::parse(text)?;
        if d.header_one::<String>("kind")? != "instance" {
            return Err(Error::Parse { line: 0, msg: "not an instance document".into() });
        }
        let v = d.header_values("variant")?;
        let nums = v[1..].iter().map(|s| parse_token::<usize>(s)).collect::<Result<Vec<_>>>()?;
        let space = match (v[0].as_str(), nums.as_slice()) {
            ("simple", [n]) => Space::Simple(SimpleSpace { n: *n }),
            ("general", [n, z, t]) => Space::General(GeneralSpace { n: *n, workspace: *z, steps: *t }),
            _ => return Err(Error::Parse { line: 0, msg: "bad variant line".into() }),
        };
        let optional = |key: &str| d.header_one::<f64>(key).ok();
        let beta = match d.header_values("beta") {
            Ok(vals) if vals.len() % 2 == 0 => {
                Some(vals.chunks(2).map(|c| Ok((parse_token(&c[0])?, parse_token(&c[1])?))).collect::<Result<Vec<_>>>()?)
            }
            Ok(_) => return Err(Error::Parse { line: 0, msg: "beta expects `j value` pairs".into() }),
            Err(_) => None,
        };
        let weights = Weights {
            omega: d.header_list("omega")?,
            alpha: d.header_list("alpha")?,
            beta,
            regime: Regime::parse(&d.header_one::<String>("regime")?)?,
            mu: optional("mu"),
            k: optional("k"),
        };
        let psi0_rows = &d.sections_named("psi0").next().ok_or_else(|| Error::Parse { line: 0, msg: "missing psi0".into() })?.rows;
        let psi0 = match psi0_rows.as_slice() {
            [row] => SparseVector::from_row(row)?,
            _ => return Err(Error::Parse { line: 0, msg: "psi0 is one row".into() }),
        };
        let mut groups = Vec::new();
        for s in d.sections_named("generators") {
            let side = match s.args.first().map(String::as_str) {
                Some("A") => Side::A,
                Some("B") => Side::B,
                _ => return Err(Error::Parse { line: 0, msg: "generator side must be A or B".into() }),
            };
            let name = s.args.get(1).cloned().unwrap_or_default();
            let vectors = s.rows.iter().map(|r| SparseVector::from_row(r)).collect::<Result<Vec<_>>>()?;
            groups.push(GeneratorGroup { name, side, vectors });
        }
        Self::from_groups(space, psi0, groups, weights, d.header_list("marked")?, tol)
    }
}
