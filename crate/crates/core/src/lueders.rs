//! Ideal (Lüders) measurements and the straight-line identities of
//! relative entropy.
//!
//! An observable is given in spectral form `A = Σ_i a_i P_i`. Its Lüders
//! state is `ρ_L(A) = Σ_i P_i ρ P_i`, and for every `ρ`
//!
//! ```text
//! S(ρ‖ρ_L(A)) = S(ρ_L(A)) − S(ρ)
//! ```
//!
//! If `B` refines `A`, then `ρ`, `ρ_L(A)` and `ρ_L(B)` lie on a line:
//! the end-to-end relative entropy is the sum over the two segments. The
//! same holds for `ρ`, its dephasing in an eigenbasis of `σ`, and `σ`.

use serde::Serialize;

use crate::entropy::{quantum_relative_entropy, von_neumann_entropy, ExtendedReal};
use crate::error::{Error, Result};
use crate::linop::{check_mutually_orthogonal, leakage_mass, pinch, support_contained, CMatrix, DensityOperator, HermitianMatrix, Projector, Tolerances, C64};

/// A discrete observable `Σ_i a_i P_i` with distinct eigenvalues and
/// orthogonal projectors resolving the identity.
#[derive(Debug, Clone)]
pub struct ProjectiveObservable {
    eigenvalues: Vec<f64>,
    projectors: Vec<Projector>,
}

impl ProjectiveObservable {
    pub fn new(eigenvalues: Vec<f64>, projectors: Vec<Projector>, tol: &Tolerances) -> Result<Self> {
        if eigenvalues.len() != projectors.len() {
            return Err(Error::LengthMismatch(eigenvalues.len(), projectors.len()));
        }
        let Some(first) = projectors.first() else {
            return Err(Error::BadObservable("no projectors".into()));
        };
        let dim = first.dim();
        if let Some(p) = projectors.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, p.dim()));
        }
        for i in 0..eigenvalues.len() {
            for j in i + 1..eigenvalues.len() {
                if eigenvalues[i] == eigenvalues[j] {
                    return Err(Error::BadObservable(format!("eigenvalue {} repeated", eigenvalues[i])));
                }
            }
        }
        check_mutually_orthogonal(&projectors, tol)?;
        let sum = projectors.iter().fold(CMatrix::zeros(dim, dim), |acc, p| acc + p.as_matrix());
        let defect = (sum - CMatrix::identity(dim, dim)).norm();
        if defect > tol.identity {
            return Err(Error::BadObservable(format!("projectors sum to identity only within {defect:e}")));
        }
        Ok(Self { eigenvalues, projectors })
    }

    /// Labels the projectors with eigenvalues `0, 1, 2, …`.
    pub fn from_projectors(projectors: Vec<Projector>, tol: &Tolerances) -> Result<Self> {
        let eigenvalues = (0..projectors.len()).map(|i| i as f64).collect();
        Self::new(eigenvalues, projectors, tol)
    }

    /// Spectral form of a Hermitian matrix. Eigenvalues closer than
    /// `tol_identity` (relative to the spectral radius) are merged.
    pub fn from_hermitian(a: &HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let spec = a.eigh()?;
        let vals = spec.eigenvalues();
        let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, &v) in vals.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if (v - vals[g[0]]).abs() <= tol.identity * scale => g.push(i),
                _ => groups.push(vec![i]),
            }
        }
        let mut eigenvalues = Vec::with_capacity(groups.len());
        let mut projectors = Vec::with_capacity(groups.len());
        for g in groups {
            eigenvalues.push(g.iter().map(|&i| vals[i]).sum::<f64>() / g.len() as f64);
            let cols: Vec<_> = g.iter().map(|&i| spec.eigenvectors().column(i).into_owned()).collect();
            projectors.push(Projector::from_orthonormal_columns(&CMatrix::from_columns(&cols)));
        }
        Self::new(eigenvalues, projectors, tol)
    }

    /// Rank-one observable diagonal in the orthonormal columns of `basis`.
    pub fn from_basis(basis: &CMatrix, tol: &Tolerances) -> Result<Self> {
        let projectors = basis
            .column_iter()
            .map(|c| Projector::from_orthonormal_columns(&CMatrix::from_columns(&[c.into_owned()])))
            .collect();
        Self::from_projectors(projectors, tol)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// `Σ_i a_i P_i`.
    pub fn matrix(&self) -> HermitianMatrix {
        let d = self.dim();
        let m = self
            .eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(CMatrix::zeros(d, d), |acc, (a, p)| acc + p.as_matrix() * C64::new(*a, 0.0));
        HermitianMatrix::symmetrized(m)
    }
}

fn check_dims(rho: &DensityOperator, a: &ProjectiveObservable) -> Result<()> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), a.dim()));
    }
    Ok(())
}

/// Indices `i` with `tr(ρ P_i) > tol_supp`.
pub fn detectable_indices(rho: &DensityOperator, a: &ProjectiveObservable) -> Result<Vec<usize>> {
    check_dims(rho, a)?;
    let tol = rho.tolerances();
    Ok(a.projectors
        .iter()
        .enumerate()
        .filter(|(_, p)| rho.expectation(p.as_matrix()) > tol.supp)
        .map(|(i, _)| i)
        .collect())
}

pub fn detectable_projectors(rho: &DensityOperator, a: &ProjectiveObservable) -> Result<Vec<Projector>> {
    Ok(detectable_indices(rho, a)?.into_iter().map(|i| a.projectors[i].clone()).collect())
}

/// `ρ_L(A) = Σ_i P_i ρ P_i` over the detectable eigenvalues.
pub fn lueders_state(rho: &DensityOperator, a: &ProjectiveObservable) -> Result<DensityOperator> {
    pinch(rho, &detectable_projectors(rho, a)?)
}

/// `Σ_i P_i ρ P_i` over every projector of `A`.
pub fn lueders_state_all(rho: &DensityOperator, a: &ProjectiveObservable) -> Result<DensityOperator> {
    check_dims(rho, a)?;
    pinch(rho, a.projectors())
}

/// `S(ρ‖ρ_L)` next to `S(ρ_L) − S(ρ)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Corollary1Report {
    pub direct: ExtendedReal,
    pub entropy_gain: f64,
    /// `supp ρ ⊆ supp ρ_L`.
    pub support_included: bool,
    pub leakage: f64,
}

impl Corollary1Report {
    pub fn residual(&self) -> Option<f64> {
        self.direct.finite().map(|d| (d - self.entropy_gain).abs())
    }
}

pub fn corollary1_check(rho: &DensityOperator, a: &ProjectiveObservable) -> Result<Corollary1Report> {
    let rho_l = lueders_state(rho, a)?;
    let tol = rho.tolerances();
    Ok(Corollary1Report {
        direct: quantum_relative_entropy(rho, &rho_l)?,
        entropy_gain: von_neumann_entropy(&rho_l) - von_neumann_entropy(rho),
        support_included: support_contained(rho, &rho_l, tol),
        leakage: leakage_mass(rho, &rho_l, tol),
    })
}

/// Maps each fine projector of `fine` to the coarse projector of `coarse`
/// containing it, and checks that every coarse projector is the sum of its
/// fine ones.
pub fn is_refinement(fine: &ProjectiveObservable, coarse: &ProjectiveObservable, tol: &Tolerances) -> Result<Vec<usize>> {
    if fine.dim() != coarse.dim() {
        return Err(Error::DimensionMismatch(fine.dim(), coarse.dim()));
    }
    let mut grouping = Vec::with_capacity(fine.len());
    for (j, f) in fine.projectors.iter().enumerate() {
        let mut owners = coarse
            .projectors
            .iter()
            .enumerate()
            .filter(|(_, c)| (c.as_matrix() * f.as_matrix() - f.as_matrix()).norm() <= tol.identity)
            .map(|(k, _)| k);
        match (owners.next(), owners.next()) {
            (Some(k), None) => grouping.push(k),
            _ => return Err(Error::NotARefinement(j)),
        }
    }
    let d = fine.dim();
    for (k, c) in coarse.projectors.iter().enumerate() {
        let sum = grouping
            .iter()
            .zip(&fine.projectors)
            .filter(|(g, _)| **g == k)
            .fold(CMatrix::zeros(d, d), |acc, (_, f)| acc + f.as_matrix());
        let defect = (sum - c.as_matrix()).norm();
        if defect > tol.identity {
            return Err(Error::BadObservable(format!("coarse projector {k} is not covered (defect {defect:e})")));
        }
    }
    Ok(grouping)
}

/// A coarse observable `A` and a refinement `B` of it.
#[derive(Debug, Clone)]
pub struct RefinementPair {
    coarse: ProjectiveObservable,
    fine: ProjectiveObservable,
    grouping: Vec<usize>,
}

impl RefinementPair {
    pub fn new(coarse: ProjectiveObservable, fine: ProjectiveObservable, tol: &Tolerances) -> Result<Self> {
        let grouping = is_refinement(&fine, &coarse, tol)?;
        Ok(Self { coarse, fine, grouping })
    }

    pub fn coarse(&self) -> &ProjectiveObservable {
        &self.coarse
    }

    pub fn fine(&self) -> &ProjectiveObservable {
        &self.fine
    }

    /// Coarse index of each fine projector.
    pub fn grouping(&self) -> &[usize] {
        &self.grouping
    }
}

/// Three relative entropies along `ρ → μ → σ`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineReport {
    pub d_total: ExtendedReal,
    pub d_first: ExtendedReal,
    pub d_second: ExtendedReal,
    /// `|d_total − d_first − d_second|`; zero when both sides are infinite,
    /// `None` when exactly one is.
    pub residual: Option<f64>,
}

impl LineReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.residual.is_some_and(|r| r <= tol)
    }

    /// `d_total ≥ d_first − tol`.
    pub fn monotone(&self, tol: f64) -> bool {
        match (self.d_total, self.d_first) {
            (ExtendedReal::Infinite, _) => true,
            (ExtendedReal::Finite(_), ExtendedReal::Infinite) => false,
            (ExtendedReal::Finite(t), ExtendedReal::Finite(f)) => t >= f - tol,
        }
    }
}

/// Evaluates `S(ρ‖σ)`, `S(ρ‖μ)` and `S(μ‖σ)` independently.
pub fn straight_line(rho: &DensityOperator, middle: &DensityOperator, sigma: &DensityOperator) -> Result<LineReport> {
    let d_total = quantum_relative_entropy(rho, sigma)?;
    let d_first = quantum_relative_entropy(rho, middle)?;
    let d_second = quantum_relative_entropy(middle, sigma)?;
    Ok(LineReport { d_total, d_first, d_second, residual: d_total.residual(&(d_first + d_second)) })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Corollary2Report {
    pub line: LineReport,
    /// `‖ρ_L(B) − (ρ_L(A))_L(B)‖_F`.
    pub composition_defect: f64,
}

pub fn corollary2_check(rho: &DensityOperator, pair: &RefinementPair) -> Result<Corollary2Report> {
    let rho_a = lueders_state(rho, &pair.coarse)?;
    let rho_b = lueders_state(rho, &pair.fine)?;
    let line = straight_line(rho, &rho_a, &rho_b)?;
    let rho_ab = lueders_state(&rho_a, &pair.fine)?;
    Ok(Corollary2Report { line, composition_defect: rho_b.distance(&rho_ab) })
}

#[derive(Debug, Clone)]
pub struct Theorem2Report {
    pub line: LineReport,
    /// `Σ_k |k⟩⟨k| ρ |k⟩⟨k|`; depends on the chosen basis when `σ` is
    /// degenerate.
    pub middle: DensityOperator,
    /// The eigenbasis of `σ` used, as columns.
    pub basis: CMatrix,
}

/// Dephases `ρ` in the eigenbasis of `σ` returned by the eigensolver.
pub fn theorem2_check(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Theorem2Report> {
    theorem2_check_in_basis(rho, sigma, sigma.spectrum().eigenvectors())
}

/// Like [`theorem2_check`] with a caller-chosen orthonormal eigenbasis of
/// `σ`.
pub fn theorem2_check_in_basis(rho: &DensityOperator, sigma: &DensityOperator, basis: &CMatrix) -> Result<Theorem2Report> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let tol = rho.tolerances();
    let leak = leakage_mass(rho, sigma, tol);
    if leak > tol.supp {
        return Err(Error::SupportViolation(leak));
    }
    let middle = dephase_in_eigenbasis(rho, sigma, basis)?;
    let line = straight_line(rho, &middle, sigma)?;
    Ok(Theorem2Report { line, middle, basis: basis.clone() })
}

/// `Σ_k |k⟩⟨k| ρ |k⟩⟨k|` after checking that `basis` is an orthonormal
/// eigenbasis of `σ`.
pub fn dephase_in_eigenbasis(rho: &DensityOperator, sigma: &DensityOperator, basis: &CMatrix) -> Result<DensityOperator> {
    let tol = rho.tolerances();
    let d = sigma.dim();
    if basis.nrows() != d || basis.ncols() != d {
        return Err(Error::DimensionMismatch(d, basis.ncols()));
    }
    let defect = (basis.adjoint() * basis - CMatrix::identity(d, d)).norm();
    if defect > tol.orth {
        return Err(Error::NotOrthonormal(defect));
    }
    let mut rotated = basis.adjoint() * sigma.as_matrix() * basis;
    rotated.fill_diagonal(C64::new(0.0, 0.0));
    let off = rotated.norm();
    if off > tol.identity {
        return Err(Error::NotEigenbasis(off));
    }
    let obs = ProjectiveObservable::from_basis(basis, tol)?;
    lueders_state_all(rho, &obs)
}
