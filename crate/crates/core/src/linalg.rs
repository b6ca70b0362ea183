//! Dense complex primitives: orthonormalization, projectors, reflections and
//! the eigendecomposition of unitaries.
//!
//! Matrix norms written `‖·‖∞` throughout the crate are the largest entry
//! modulus. Every tolerance decision goes through a [`TolerancePolicy`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

/// Largest dimension any dense operator in the crate may have.
pub const DIM_CAP: usize = 5000;

/// Products smaller than this many scalar multiply-adds use nalgebra directly.
const SPLIT_GEMM_THRESHOLD: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative threshold for numerical rank decisions.
    pub rank_tol: f64,
    /// Absolute tolerance for every asserted identity.
    pub assert_tol: f64,
    /// Eigenvalues closer than this are treated as one cluster.
    pub eig_cluster_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { rank_tol: 1e-10, assert_tol: 1e-8, eig_cluster_tol: 1e-9 }
    }
}

impl TolerancePolicy {
    pub fn new(rank_tol: f64, assert_tol: f64, eig_cluster_tol: f64) -> Result<Self> {
        let p = Self { rank_tol, assert_tol, eig_cluster_tol };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.rank_tol.is_finite() && self.assert_tol.is_finite() && self.eig_cluster_tol.is_finite();
        if !finite || self.rank_tol <= 0.0 || self.rank_tol > self.assert_tol || self.eig_cluster_tol <= 0.0 {
            return Err(Error::InvalidTolerance(format!(
                "need 0 < rank_tol <= assert_tol and eig_cluster_tol > 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

pub fn check_dim(dim: usize) -> Result<()> {
    if dim > DIM_CAP {
        return Err(Error::DimensionCap { dim, cap: DIM_CAP });
    }
    Ok(())
}

pub fn basis_vector(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = C64::new(1.0, 0.0);
    v
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

fn split(m: &CMatrix) -> (RMatrix, RMatrix) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

fn join(re: RMatrix, im: RMatrix) -> CMatrix {
    re.zip_map(&im, C64::new)
}

/// `a * b`. Large products go through four real GEMMs, which are far faster
/// than nalgebra's generic complex kernel.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if a.nrows() * a.ncols() * b.ncols() < SPLIT_GEMM_THRESHOLD {
        return a * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    join(&ar * &br - &ai * &bi, &ar * &bi + &ai * &br)
}

/// `a† * b`.
pub fn adjoint_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if a.nrows() * a.ncols() * b.ncols() < SPLIT_GEMM_THRESHOLD {
        return a.ad_mul(b);
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    join(ar.tr_mul(&br) + ai.tr_mul(&bi), ar.tr_mul(&bi) - ai.tr_mul(&br))
}

/// `a * b†`.
pub fn mul_adjoint(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if a.nrows() * a.ncols() * b.nrows() < SPLIT_GEMM_THRESHOLD {
        return a * b.adjoint();
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    join(&ar * br.transpose() + &ai * bi.transpose(), &ai * br.transpose() - &ar * bi.transpose())
}

pub fn columns_to_matrix(dim: usize, cols: &[CVector]) -> CMatrix {
    let mut m = CMatrix::zeros(dim, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Orthonormal basis of the span of `vectors`, by column-pivoted modified
/// Gram–Schmidt with one reorthogonalization pass.
///
/// A column is accepted while its residual norm exceeds
/// `rank_tol × (largest input norm)`, so the basis size is the numerical rank.
pub fn orthonormalize(vectors: &[CVector], tol: &TolerancePolicy) -> Result<Vec<CVector>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let n = first.len();
    check_dim(n)?;
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    let mut work: Vec<CVector> = vectors.to_vec();
    let scale = work.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let cutoff = tol.rank_tol * scale;
    let mut remaining: Vec<usize> = (0..work.len()).collect();
    let mut basis: Vec<CVector> = Vec::new();

    while !remaining.is_empty() {
        let (pos, best) = remaining
            .iter()
            .enumerate()
            .map(|(p, &j)| (p, work[j].norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= cutoff {
            break;
        }
        let j = remaining.remove(pos);
        let mut q = std::mem::replace(&mut work[j], CVector::zeros(0));
        for b in &basis {
            let c = b.dotc(&q);
            q.axpy(-c, b, C64::new(1.0, 0.0));
        }
        let nq = q.norm();
        if nq <= cutoff {
            continue;
        }
        q.unscale_mut(nq);
        for &r in &remaining {
            let c = q.dotc(&work[r]);
            work[r].axpy(-c, &q, C64::new(1.0, 0.0));
        }
        basis.push(q);
    }
    Ok(basis)
}

/// Orthogonal projector, stored both as an orthonormal basis of its range and
/// as the dense matrix `Q Q†`.
#[derive(Debug, Clone)]
pub struct Projector {
    basis: CMatrix,
    matrix: CMatrix,
}

impl Projector {
    pub fn zero(dim: usize) -> Self {
        Self { basis: CMatrix::zeros(dim, 0), matrix: CMatrix::zeros(dim, dim) }
    }

    /// Caller guarantees `basis` is orthonormal.
    pub fn from_orthonormal(dim: usize, basis: &[CVector]) -> Self {
        let q = columns_to_matrix(dim, basis);
        let matrix = mul_adjoint(&q, &q);
        Self { basis: q, matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Orthonormal columns spanning the range.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        if self.rank() == 0 {
            return CVector::zeros(v.len());
        }
        &self.basis * self.basis.ad_mul(v)
    }

    /// `(I − P) v`
    pub fn complement(&self, v: &CVector) -> CVector {
        v - self.apply(v)
    }

    /// `(2P − I) v`
    pub fn reflect(&self, v: &CVector) -> CVector {
        self.apply(v) * C64::new(2.0, 0.0) - v
    }

    /// `(2P − I) M` without forming `2P − I`.
    pub fn reflect_matrix(&self, m: &CMatrix) -> CMatrix {
        if self.rank() == 0 {
            return -m;
        }
        let coeff = adjoint_mul(&self.basis, m);
        matmul(&self.basis, &coeff) * C64::new(2.0, 0.0) - m
    }

    /// (‖P − P†‖∞, ‖P² − P‖∞)
    pub fn residuals(&self) -> (f64, f64) {
        let herm = max_abs(&(&self.matrix - self.matrix.adjoint()));
        let idem = max_abs(&(matmul(&self.matrix, &self.matrix) - &self.matrix));
        (herm, idem)
    }
}

/// Projector onto the span of `vectors` in a space of dimension `dim`.
pub fn projector_from_set(dim: usize, vectors: &[CVector], tol: &TolerancePolicy) -> Result<Projector> {
    check_dim(dim)?;
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    let basis = orthonormalize(vectors, tol)?;
    Ok(Projector::from_orthonormal(dim, &basis))
}

/// The dense reflection `2P − I`.
pub fn reflection(p: &Projector) -> CMatrix {
    let n = p.dim();
    p.matrix() * C64::new(2.0, 0.0) - CMatrix::identity(n, n)
}

/// ‖U†U − I‖∞
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(adjoint_mul(u, u) - CMatrix::identity(n, n)))
}

/// Eigenpairs `U v_j = e^{iθ_j} v_j` with θ_j ∈ (−π, π], sorted by phase.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub phases: Vec<f64>,
    /// Eigenvectors as columns.
    pub vectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// |⟨v_j|ψ⟩|² for every j.
    pub fn weights(&self, psi: &CVector) -> Vec<f64> {
        self.vectors.ad_mul(psi).iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &th) in self.phases.iter().enumerate() {
            let e = C64::from_polar(1.0, th);
            for x in scaled.column_mut(j).iter_mut() {
                *x *= e;
            }
        }
        mul_adjoint(&scaled, &self.vectors)
    }

    /// max_j ‖U v_j − e^{iθ_j} v_j‖
    pub fn eigen_residual(&self, u: &CMatrix) -> f64 {
        let uv = matmul(u, &self.vectors);
        let mut worst: f64 = 0.0;
        for (j, &th) in self.phases.iter().enumerate() {
            let e = C64::from_polar(1.0, th);
            let r = uv.column(j) - self.vectors.column(j) * e;
            worst = worst.max(r.norm());
        }
        worst
    }

    /// ‖V†V − I‖∞
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.vectors.ncols();
        max_abs(&(adjoint_mul(&self.vectors, &self.vectors) - CMatrix::identity(n, n)))
    }
}

fn hermitian_eig(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    if is_real(h) {
        let e = SymmetricEigen::new(h.map(|z| z.re));
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let e = SymmetricEigen::new(h.clone());
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    }
}

fn principal_phase(z: C64) -> f64 {
    let th = z.arg();
    if th <= -std::f64::consts::PI { std::f64::consts::PI } else { th }
}

/// Eigendecomposition of a unitary.
///
/// The Hermitian part `(U + U†)/2` is diagonalized first; its eigenspaces are
/// invariant under `U`, and inside each cluster of equal `cos θ` the
/// restriction of `U` is split by its anti-Hermitian part. Phases are read off
/// as arguments of Rayleigh quotients, which keeps small phases accurate.
/// The result is checked against `U` and rejected if any eigenpair misses by
/// more than `assert_tol`.
pub fn unitary_eig(u: &CMatrix, tol: &TolerancePolicy) -> Result<SpectralDecomposition> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.ncols() });
    }
    check_dim(n)?;
    if n == 0 {
        return Ok(SpectralDecomposition { phases: Vec::new(), vectors: CMatrix::zeros(0, 0) });
    }
    let residual = unitarity_residual(u);
    if residual > tol.assert_tol {
        return Err(Error::NotUnitary { residual });
    }

    let h = (u + u.adjoint()) * C64::new(0.5, 0.0);
    let (vals, vecs) = hermitian_eig(&h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &j in &order {
        match clusters.last_mut() {
            Some(c) if vals[j] - vals[*c.last().unwrap()] <= tol.eig_cluster_tol => c.push(j),
            _ => clusters.push(vec![j]),
        }
    }

    let uv = matmul(u, &vecs);
    let mut pairs: Vec<(f64, CVector)> = Vec::with_capacity(n);
    for c in &clusters {
        let vc = vecs.select_columns(c.iter());
        let uvc = uv.select_columns(c.iter());
        let w = vc.ad_mul(&uvc);
        if c.len() == 1 {
            pairs.push((principal_phase(w[(0, 0)]), vc.column(0).into_owned()));
            continue;
        }
        let s = (&w - w.adjoint()) * C64::new(0.0, -0.5);
        let (_, y) = hermitian_eig(&s);
        for k in 0..y.ncols() {
            let yk = y.column(k).into_owned();
            let rq = yk.dotc(&(&w * &yk));
            pairs.push((principal_phase(rq), &vc * yk));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let phases = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<CVector> = pairs.into_iter().map(|p| p.1).collect();
    let eig = SpectralDecomposition { phases, vectors: columns_to_matrix(n, &cols) };
    let residual = eig.eigen_residual(u);
    if residual > tol.assert_tol {
        return Err(Error::EigenFailure { residual });
    }
    Ok(eig)
}
