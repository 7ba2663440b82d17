//! Validated operator types and the spectral machinery underneath every
//! entropy evaluation.
//!
//! All operators are dense `DMatrix<Complex<f64>>`. A [`HermitianMatrix`] is
//! exactly Hermitian (symmetrized on construction), a [`DensityOperator`]
//! additionally carries its cached spectrum and the [`Tolerances`] it was
//! validated with, and a [`Projector`] carries its rank.
//!
//! An eigenvalue is treated as zero iff it is at most `tol_rank * λ_max`.
//! The same relative cutoff defines supports, the extended logarithm and the
//! zero convention in entropy sums.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const EIGH_EPS: f64 = 1e-15;
const EIGH_MAX_ITER: usize = 0;

/// Numerical tolerances. Every field must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative Hermiticity defect `‖M − M†‖_F / ‖M‖_F`.
    pub herm: f64,
    /// Most negative eigenvalue accepted (and clamped) in a state.
    pub psd: f64,
    /// Accepted `|tr ρ − 1|` before renormalization.
    pub trace: f64,
    /// Relative eigenvalue cutoff defining the numerical support.
    pub rank: f64,
    /// Probability mass regarded as zero (support leakage, detectability).
    pub supp: f64,
    /// Threshold for operator and scalar identities.
    pub identity: f64,
    /// Idempotence defect `‖P² − P‖_F` of a projector.
    pub idem: f64,
    /// Orthonormality defect of eigenvectors or supplied bases.
    pub orth: f64,
    /// Spectral reconstruction error `‖V Λ V† − M‖_F`.
    pub recon: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            psd: 1e-10,
            trace: 1e-8,
            rank: 1e-10,
            supp: 1e-9,
            identity: 1e-8,
            idem: 1e-10,
            orth: 1e-10,
            recon: 1e-10,
        }
    }
}

impl Tolerances {
    /// Defaults with the identity threshold replaced.
    pub fn with_identity(identity: f64) -> Self {
        Self { identity, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.herm, self.psd, self.trace, self.rank, self.supp, self.identity, self.idem,
            self.orth, self.recon,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::BadSpec("tolerances must be finite and strictly positive".into()))
        }
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Real part of `tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

fn real_trace(m: &CMatrix) -> f64 {
    compensated_sum((0..m.nrows()).map(|i| m[(i, i)].re))
}

/// `(M + M†) / 2`.
fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// An exactly Hermitian square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Checks the relative Hermiticity defect against `tol.herm`, then
    /// symmetrizes.
    pub fn new(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotHermitian(f64::INFINITY));
        }
        let scale = m.norm();
        let defect = (&m - m.adjoint()).norm();
        if defect > tol.herm * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotHermitian(defect / scale.max(f64::MIN_POSITIVE)));
        }
        Ok(Self { m: symmetrize(&m) })
    }

    /// Symmetrizes without checking. Used where Hermiticity holds by
    /// construction and only round-off needs removing.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        Self { m: symmetrize(&m) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: CMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self { m: CMatrix::from_diagonal(&v) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        real_trace(&self.m)
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::symmetrized(u * &self.m * u.adjoint())
    }

    /// Frobenius distance to another matrix of the same shape.
    pub fn distance(&self, other: &CMatrix) -> f64 {
        (&self.m - other).norm()
    }

    pub fn eigh(&self) -> Result<SpectralDecomposition> {
        eigh(self)
    }
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues and
/// orthonormal eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors as columns, ordered like [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Eigenvalues at or below this are treated as zero.
    pub fn cutoff(&self, tol_rank: f64) -> f64 {
        tol_rank * self.max_eigenvalue().max(0.0)
    }

    /// Indices of eigenvalues above the support cutoff.
    pub fn support_indices(&self, tol_rank: f64) -> impl Iterator<Item = usize> + '_ {
        let cut = self.cutoff(tol_rank);
        self.eigenvalues.iter().enumerate().filter(move |(_, &l)| l > cut).map(|(i, _)| i)
    }

    /// `Σ f(λ_n) |n⟩⟨n|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (n, &l) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(n).scale_mut(f(l));
        }
        HermitianMatrix::symmetrized(&scaled * self.eigenvectors.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|l| l)
    }

    /// `‖V†V − I‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.dim();
        (self.eigenvectors.adjoint() * &self.eigenvectors - CMatrix::identity(d, d)).norm()
    }

    /// `⟨n|A|n⟩` for every eigenvector.
    pub fn diagonal_of(&self, a: &CMatrix) -> Vec<f64> {
        (0..self.dim())
            .map(|n| {
                let v = self.eigenvectors.column(n);
                (v.adjoint() * a * v)[(0, 0)].re
            })
            .collect()
    }
}

/// Hermitian eigensolver. Eigenvalues ascending; deterministic for a fixed
/// input.
pub fn eigh(m: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let eig = m
        .as_matrix()
        .clone()
        .try_symmetric_eigen(EIGH_EPS, EIGH_MAX_ITER)
        .ok_or(Error::SolverFailure)?;
    let d = m.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::SolverFailure);
    }
    let mut eigenvectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// A Hermitian, positive-semidefinite, unit-trace matrix with its spectrum.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: HermitianMatrix,
    spectrum: SpectralDecomposition,
    tol: Tolerances,
}

impl PartialEq for DensityOperator {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

/// Symmetrizes, clamps eigenvalues in `[-tol_psd, 0)` to zero and
/// renormalizes the trace to exactly one.
pub fn validate_density(raw: CMatrix, tol: &Tolerances) -> Result<DensityOperator> {
    let herm = HermitianMatrix::new(raw, tol)?;
    DensityOperator::from_hermitian(herm, tol)
}

impl DensityOperator {
    pub fn new(raw: CMatrix, tol: &Tolerances) -> Result<Self> {
        validate_density(raw, tol)
    }

    pub fn from_hermitian(herm: HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let spectrum = eigh(&herm)?;
        let min = spectrum.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -tol.psd {
            return Err(Error::NotPositive(min));
        }
        let trace = herm.trace();
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::BadTrace(trace));
        }
        let (matrix, mut spectrum) = if min < 0.0 {
            let mut clamped = spectrum;
            for l in clamped.eigenvalues.iter_mut() {
                *l = l.max(0.0);
            }
            (clamped.reconstruct(), clamped)
        } else {
            (herm, spectrum)
        };
        let trace = matrix.trace();
        let inv = 1.0 / trace;
        let matrix = HermitianMatrix { m: matrix.m * C64::new(inv, 0.0) };
        for l in spectrum.eigenvalues.iter_mut() {
            *l *= inv;
        }
        Ok(Self { matrix, spectrum, tol: *tol })
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn pure(psi: &CVector, tol: &Tolerances) -> Result<Self> {
        let norm = psi.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::BadTrace(0.0));
        }
        let v = psi / C64::new(norm, 0.0);
        Self::from_hermitian(HermitianMatrix::symmetrized(&v * v.adjoint()), tol)
    }

    pub fn from_diagonal(probs: &[f64], tol: &Tolerances) -> Result<Self> {
        Self::from_hermitian(HermitianMatrix::from_real_diagonal(probs), tol)
    }

    pub fn maximally_mixed(dim: usize, tol: &Tolerances) -> Result<Self> {
        let p = vec![1.0 / dim as f64; dim];
        Self::from_diagonal(&p, tol)
    }

    /// `Σ_k p_k |k⟩⟨k|` for orthonormal columns `|k⟩`.
    pub fn from_ensemble(probs: &[f64], basis: &CMatrix, tol: &Tolerances) -> Result<Self> {
        if probs.len() != basis.ncols() {
            return Err(Error::LengthMismatch(probs.len(), basis.ncols()));
        }
        let mut scaled = basis.clone();
        for (k, &p) in probs.iter().enumerate() {
            scaled.column_mut(k).scale_mut(p);
        }
        Self::from_hermitian(HermitianMatrix::symmetrized(&scaled * basis.adjoint()), tol)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn as_matrix(&self) -> &CMatrix {
        self.matrix.as_matrix()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Re-tag with different tolerances. The matrix is unchanged.
    pub fn with_tolerances(mut self, tol: &Tolerances) -> Self {
        self.tol = *tol;
        self
    }

    /// Eigenvalues above the support cutoff.
    pub fn nonzero_eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.spectrum.support_indices(self.tol.rank).map(|i| self.spectrum.eigenvalues[i])
    }

    pub fn rank(&self) -> usize {
        self.spectrum.support_indices(self.tol.rank).count()
    }

    pub fn min_nonzero_eigenvalue(&self) -> f64 {
        self.nonzero_eigenvalues().fold(f64::INFINITY, f64::min)
    }

    pub fn support_projector(&self) -> Projector {
        support_projector(self, &self.tol)
    }

    pub fn extended_log(&self) -> HermitianMatrix {
        let cut = self.spectrum.cutoff(self.tol.rank);
        self.spectrum.map(|l| if l > cut { l.ln() } else { 0.0 })
    }

    /// `tr(ρ A)`.
    pub fn expectation(&self, a: &CMatrix) -> f64 {
        trace_product(self.as_matrix(), a)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        Self::from_hermitian(self.matrix.conjugate_by(u), &self.tol)
    }

    pub fn distance(&self, other: &DensityOperator) -> f64 {
        self.matrix.distance(other.as_matrix())
    }
}

/// A Hermitian idempotent matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: HermitianMatrix,
    rank: usize,
}

impl Projector {
    pub fn new(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        let matrix = HermitianMatrix::new(m, tol)?;
        let p = matrix.as_matrix();
        let defect = (p * p - p).norm();
        if defect > tol.idem {
            return Err(Error::NotIdempotent(defect));
        }
        let rank = matrix.trace().round().max(0.0) as usize;
        Ok(Self { matrix, rank })
    }

    /// Projector onto the span of orthonormal columns.
    pub fn from_orthonormal_columns(v: &CMatrix) -> Self {
        Self { matrix: HermitianMatrix::symmetrized(v * v.adjoint()), rank: v.ncols() }
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: HermitianMatrix::zeros(dim), rank: 0 }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: HermitianMatrix::identity(dim), rank: dim }
    }

    /// Diagonal projector selecting the given coordinates.
    pub fn coordinate(dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut diag = vec![0.0; dim];
        let mut rank = 0;
        for i in indices {
            if diag[i] == 0.0 {
                rank += 1;
            }
            diag[i] = 1.0;
        }
        Self { matrix: HermitianMatrix::from_real_diagonal(&diag), rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        self.matrix.as_matrix()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// `P A P`.
    pub fn sandwich(&self, a: &CMatrix) -> CMatrix {
        let p = self.as_matrix();
        p * a * p
    }

    /// Orthonormal basis of the range, as columns.
    pub fn range_basis(&self) -> Result<CMatrix> {
        let spec = eigh(&self.matrix)?;
        let d = self.dim();
        let cols: Vec<_> = (d - self.rank..d).map(|i| spec.eigenvectors.column(i).into_owned()).collect();
        if cols.is_empty() {
            return Ok(CMatrix::zeros(d, 0));
        }
        Ok(CMatrix::from_columns(&cols))
    }

    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self { matrix: self.matrix.conjugate_by(u), rank: self.rank }
    }
}

/// `Σ_{λ_n > tol_rank·λ_max} |n⟩⟨n|`.
pub fn support_projector(rho: &DensityOperator, tol: &Tolerances) -> Projector {
    let spec = rho.spectrum();
    let cols: Vec<_> = spec.support_indices(tol.rank).map(|i| spec.eigenvectors.column(i).into_owned()).collect();
    if cols.is_empty() {
        return Projector::zero(rho.dim());
    }
    Projector::from_orthonormal_columns(&CMatrix::from_columns(&cols))
}

/// Spectral logarithm with eigenvalues at or below the support cutoff
/// mapped to zero.
pub fn extended_log(m: &HermitianMatrix, tol: &Tolerances) -> Result<HermitianMatrix> {
    let spec = eigh(m)?;
    let cut = spec.cutoff(tol.rank);
    Ok(spec.map(|l| if l > cut { l.ln() } else { 0.0 }))
}

/// Checks `‖P_i P_j‖_F ≤ tol_identity` for all `i ≠ j`.
pub fn check_mutually_orthogonal(projs: &[Projector], tol: &Tolerances) -> Result<()> {
    for i in 0..projs.len() {
        for j in i + 1..projs.len() {
            let overlap = (projs[i].as_matrix() * projs[j].as_matrix()).norm();
            if overlap > tol.identity {
                return Err(Error::NotOrthogonal(i, j, overlap));
            }
        }
    }
    Ok(())
}

/// `Σ_k P_k ρ P_k`, revalidated as a state.
pub fn pinch(rho: &DensityOperator, projs: &[Projector]) -> Result<DensityOperator> {
    let tol = rho.tolerances();
    for p in projs {
        if p.dim() != rho.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), p.dim()));
        }
    }
    check_mutually_orthogonal(projs, tol)?;
    let d = rho.dim();
    let mut acc = CMatrix::zeros(d, d);
    for p in projs {
        acc += p.sandwich(rho.as_matrix());
    }
    let out = HermitianMatrix::symmetrized(acc);
    let trace = out.trace();
    if trace < 1.0 - tol.supp {
        return Err(Error::MassLoss(trace));
    }
    DensityOperator::from_hermitian(out, tol)
}

/// `tr(ρ (I − Π_σ))`, summed over the null eigenvectors of σ.
pub fn leakage_mass(rho: &DensityOperator, sigma: &DensityOperator, tol: &Tolerances) -> f64 {
    let spec = sigma.spectrum();
    let cut = spec.cutoff(tol.rank);
    let null = spec.eigenvalues.iter().enumerate().filter(|(_, &l)| l <= cut).map(|(i, _)| i);
    compensated_sum(null.map(|n| {
        let v = spec.eigenvectors.column(n);
        (v.adjoint() * rho.as_matrix() * v)[(0, 0)].re
    }))
    .max(0.0)
}

/// Whether `supp ρ ⊆ supp σ` up to a leakage mass of `tol_supp`.
pub fn support_contained(rho: &DensityOperator, sigma: &DensityOperator, tol: &Tolerances) -> bool {
    rho.dim() == sigma.dim() && leakage_mass(rho, sigma, tol) <= tol.supp
}
