//! Orthogonal state decompositions `σ = Σ_k w_k σ_k` and the mixing
//! property of relative entropy.
//!
//! For a decomposition with support projectors `Q_k` and a state `ρ` with
//! `supp ρ ⊆ supp σ`,
//!
//! ```text
//! S(ρ‖σ) = S(Σ_k Q_k ρ Q_k) − S(ρ) + H(p‖w) + Σ_k p_k S(ρ_k‖σ_k)
//! ```
//!
//! with `p_k = tr(ρ Q_k)` and `ρ_k = Q_k ρ Q_k / p_k`. [`theorem1_breakdown`]
//! evaluates every term on the right and the left side independently.
//! Terms with `w_k = 0` or `p_k = 0` are omitted, where "zero" means at or
//! below `tol_supp`.

use serde::Serialize;

use crate::entropy::{classical_relative_entropy, quantum_relative_entropy, shannon_entropy, von_neumann_entropy, ExtendedReal, ProbabilityVector};
use crate::error::{Error, Result};
use crate::linop::{check_mutually_orthogonal, compensated_sum, support_contained, CMatrix, DensityOperator, HermitianMatrix, Projector, Tolerances, C64};

/// `σ = Σ_k w_k σ_k` with mutually orthogonal supports.
#[derive(Debug, Clone)]
pub struct OrthogonalDecomposition {
    weights: ProbabilityVector,
    parts: Vec<Option<DensityOperator>>,
    supports: Vec<Projector>,
    sigma: DensityOperator,
}

impl OrthogonalDecomposition {
    /// Builds a decomposition from weights and parts. Parts whose weight is
    /// at or below `tol_supp` are discarded and their weight zeroed; every
    /// other weight needs a part. The parent `σ` is recomputed as the sum.
    pub fn new(weights: Vec<f64>, parts: Vec<Option<DensityOperator>>, tol: &Tolerances) -> Result<Self> {
        if weights.len() != parts.len() {
            return Err(Error::LengthMismatch(weights.len(), parts.len()));
        }
        let dim = parts
            .iter()
            .flatten()
            .map(DensityOperator::dim)
            .next()
            .ok_or_else(|| Error::BadProbability("no part with positive weight".into()))?;
        let mut w = weights;
        let mut kept = Vec::with_capacity(parts.len());
        for (wk, part) in w.iter_mut().zip(parts) {
            if *wk <= tol.supp {
                *wk = 0.0;
                kept.push(None);
                continue;
            }
            let part = part.ok_or_else(|| Error::BadProbability(format!("weight {wk} has no part")))?;
            if part.dim() != dim {
                return Err(Error::DimensionMismatch(dim, part.dim()));
            }
            kept.push(Some(part.with_tolerances(tol)));
        }
        let weights = ProbabilityVector::new(w, tol)?;
        let supports: Vec<Projector> = kept
            .iter()
            .map(|p| p.as_ref().map_or_else(|| Projector::zero(dim), DensityOperator::support_projector))
            .collect();
        check_mutually_orthogonal(&supports, tol)?;

        let mut sum = CMatrix::zeros(dim, dim);
        for (wk, part) in weights.as_slice().iter().zip(&kept) {
            if let Some(part) = part {
                sum += part.as_matrix() * C64::new(*wk, 0.0);
            }
        }
        let sigma = DensityOperator::from_hermitian(HermitianMatrix::symmetrized(sum), tol)?;
        Ok(Self { weights, parts: kept, supports, sigma })
    }

    pub fn weights(&self) -> &ProbabilityVector {
        &self.weights
    }

    /// `σ_k`, absent where `w_k = 0`.
    pub fn parts(&self) -> &[Option<DensityOperator>] {
        &self.parts
    }

    /// `Q_k`, the zero projector where `w_k = 0`.
    pub fn supports(&self) -> &[Projector] {
        &self.supports
    }

    /// The parent state `Σ_k w_k σ_k`.
    pub fn sigma(&self) -> &DensityOperator {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn tolerances(&self) -> &Tolerances {
        self.sigma.tolerances()
    }

    /// `(k, w_k, σ_k, Q_k)` over the primed index set `w_k > 0`.
    pub fn present(&self) -> impl Iterator<Item = (usize, f64, &DensityOperator, &Projector)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .filter_map(move |(k, p)| p.as_ref().map(|p| (k, self.weights.as_slice()[k], p, &self.supports[k])))
    }

    /// Same decomposition with an extra zero-weight slot appended.
    pub fn with_zero_part(&self) -> Self {
        let mut weights: Vec<f64> = self.weights.as_slice().to_vec();
        weights.push(0.0);
        let mut parts = self.parts.clone();
        parts.push(None);
        let mut supports = self.supports.clone();
        supports.push(Projector::zero(self.dim()));
        Self {
            weights: ProbabilityVector::new(weights, self.tolerances()).expect("weights already valid"),
            parts,
            supports,
            sigma: self.sigma.clone(),
        }
    }
}

/// Splits `σ` along mutually orthogonal blocks `B_k`: `w_k = tr(σ B_k)`,
/// `σ_k = B_k σ B_k / w_k`. `σ` must carry no mass outside `Σ B_k` and no
/// coherence between blocks.
pub fn decompose_by_projectors(sigma: &DensityOperator, blocks: &[Projector]) -> Result<OrthogonalDecomposition> {
    let tol = *sigma.tolerances();
    let dim = sigma.dim();
    for b in blocks {
        if b.dim() != dim {
            return Err(Error::DimensionMismatch(dim, b.dim()));
        }
    }
    check_mutually_orthogonal(blocks, &tol)?;
    let weights: Vec<f64> = blocks.iter().map(|b| sigma.expectation(b.as_matrix())).collect();
    let covered = compensated_sum(weights.iter().copied());
    if 1.0 - covered > tol.supp {
        return Err(Error::LeakedSupport(1.0 - covered));
    }
    let sandwiches: Vec<CMatrix> = blocks.iter().map(|b| b.sandwich(sigma.as_matrix())).collect();
    let block_sum = sandwiches.iter().fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
    let off_block = sigma.matrix().distance(&block_sum);
    if off_block > tol.identity {
        return Err(Error::NotBlockDiagonal(off_block));
    }
    let mut parts = Vec::with_capacity(blocks.len());
    for (wk, m) in weights.iter().zip(sandwiches) {
        if *wk > tol.supp {
            let part = HermitianMatrix::symmetrized(m * C64::new(1.0 / wk, 0.0));
            parts.push(Some(DensityOperator::from_hermitian(part, &tol)?));
        } else {
            parts.push(None);
        }
    }
    OrthogonalDecomposition::new(weights, parts, &tol)
}

/// `Σ'_k ln(w_k) Q_k + Σ'_k log^e(σ_k)`, which equals `log^e(σ)`.
pub fn lemma1_log_decomposition(d: &OrthogonalDecomposition) -> HermitianMatrix {
    let dim = d.dim();
    let mut acc = CMatrix::zeros(dim, dim);
    for (_, wk, part, q) in d.present() {
        acc += q.as_matrix() * C64::new(wk.ln(), 0.0);
        acc += part.extended_log().as_matrix();
    }
    HermitianMatrix::symmetrized(acc)
}

/// Both sides of `S(σ) = H(w) + Σ_k w_k S(σ_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingIdentity {
    pub lhs: f64,
    pub rhs: f64,
}

impl MixingIdentity {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn entropy_mixing_identity(d: &OrthogonalDecomposition) -> MixingIdentity {
    let lhs = von_neumann_entropy(d.sigma());
    let averaged = compensated_sum(d.present().map(|(_, wk, part, _)| wk * von_neumann_entropy(part)));
    let rhs = shannon_entropy(d.weights()) + averaged;
    MixingIdentity { lhs, rhs }
}

/// Every term of the relative-entropy mixing identity for one `(ρ, σ)`.
#[derive(Debug, Clone)]
pub struct MixingBreakdown {
    /// `S(Σ_k Q_k ρ Q_k)`; the pinched operator is not renormalized.
    pub s_pinched: f64,
    /// `S(ρ)`.
    pub s_rho: f64,
    /// `H(p‖w)`.
    pub h_rel: ExtendedReal,
    /// `Σ_k p_k S(ρ_k‖σ_k)` over `p_k > 0`.
    pub avg_rel: ExtendedReal,
    /// `p_k = tr(ρ Q_k)`. Sums to one exactly when the support condition
    /// holds.
    pub p: Vec<f64>,
    /// `ρ_k = Q_k ρ Q_k / p_k`, present iff `p_k > tol_supp`.
    pub conditional_states: Vec<Option<DensityOperator>>,
    /// Right-hand side; `+∞` when `Σ_k p_k < 1`.
    pub total_rhs: ExtendedReal,
    /// `S(ρ‖σ)` evaluated directly.
    pub total_lhs: ExtendedReal,
    /// `|lhs − rhs|` when both are finite, zero when both are infinite,
    /// `None` when only one is.
    pub residual: Option<f64>,
    /// `1 − Σ_k p_k`.
    pub leakage: f64,
    /// Smallest nonzero eigenvalue of `σ`.
    pub sigma_min_eigenvalue: f64,
    /// Per block: smallest nonzero eigenvalue of `σ_k`, absent where
    /// `p_k = 0`. Small values flag near-singular `σ_k` relative to `ρ_k`.
    pub block_min_eigenvalues: Vec<Option<f64>>,
}

impl MixingBreakdown {
    /// Sum of the four right-hand terms, ignoring the support gate.
    pub fn term_sum(&self) -> ExtendedReal {
        ExtendedReal::Finite(self.s_pinched - self.s_rho) + self.h_rel + self.avg_rel
    }

    pub fn infinities_agree(&self) -> bool {
        self.total_lhs.is_infinite() == self.total_rhs.is_infinite()
    }
}

/// `−Σ λ ln λ` of a PSD operator that need not have unit trace.
fn entropy_of_operator(m: &HermitianMatrix, tol: &Tolerances) -> Result<f64> {
    let spec = m.eigh()?;
    let s = -compensated_sum(spec.support_indices(tol.rank).map(|i| {
        let l = spec.eigenvalues()[i];
        l * l.ln()
    }));
    Ok(s)
}

pub fn theorem1_breakdown(rho: &DensityOperator, d: &OrthogonalDecomposition) -> Result<MixingBreakdown> {
    if rho.dim() != d.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), d.dim()));
    }
    let tol = *d.tolerances();
    let dim = rho.dim();
    let weights = d.weights().as_slice();

    let sandwiches: Vec<CMatrix> = d.supports().iter().map(|q| q.sandwich(rho.as_matrix())).collect();
    let p: Vec<f64> = d.supports().iter().map(|q| rho.expectation(q.as_matrix()).max(0.0)).collect();
    let mass = compensated_sum(p.iter().copied());
    let leakage = 1.0 - mass;

    let pinched = sandwiches.iter().fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
    let s_pinched = entropy_of_operator(&HermitianMatrix::symmetrized(pinched), &tol)?;
    let s_rho = von_neumann_entropy(rho);

    let mut h_terms = Vec::with_capacity(p.len());
    let mut h_infinite = false;
    for (&pk, &wk) in p.iter().zip(weights) {
        if pk <= tol.supp {
            continue;
        }
        if wk <= tol.supp {
            h_infinite = true;
        } else {
            h_terms.push(pk * (pk / wk).ln());
        }
    }
    let h_rel = if h_infinite { ExtendedReal::Infinite } else { ExtendedReal::Finite(compensated_sum(h_terms)) };

    let mut conditional_states = Vec::with_capacity(p.len());
    let mut block_min_eigenvalues = Vec::with_capacity(p.len());
    let mut avg_terms = Vec::new();
    let mut avg_infinite = false;
    for (k, (m, &pk)) in sandwiches.into_iter().zip(&p).enumerate() {
        if pk <= tol.supp {
            conditional_states.push(None);
            block_min_eigenvalues.push(None);
            continue;
        }
        let rho_k = DensityOperator::from_hermitian(HermitianMatrix::symmetrized(m * C64::new(1.0 / pk, 0.0)), &tol)?;
        match &d.parts()[k] {
            Some(sigma_k) => {
                block_min_eigenvalues.push(Some(sigma_k.min_nonzero_eigenvalue()));
                match quantum_relative_entropy(&rho_k, sigma_k)? {
                    ExtendedReal::Finite(x) => avg_terms.push(pk * x),
                    ExtendedReal::Infinite => avg_infinite = true,
                }
            }
            None => {
                block_min_eigenvalues.push(None);
                avg_infinite = true;
            }
        }
        conditional_states.push(Some(rho_k));
    }
    let avg_rel = if avg_infinite { ExtendedReal::Infinite } else { ExtendedReal::Finite(compensated_sum(avg_terms)) };

    let total_rhs = if leakage > tol.supp {
        ExtendedReal::Infinite
    } else {
        ExtendedReal::Finite(s_pinched - s_rho) + h_rel + avg_rel
    };
    let total_lhs = quantum_relative_entropy(rho, d.sigma())?;
    let residual = total_lhs.residual(&total_rhs);

    Ok(MixingBreakdown {
        s_pinched,
        s_rho,
        h_rel,
        avg_rel,
        p,
        conditional_states,
        total_rhs,
        total_lhs,
        residual,
        leakage,
        sigma_min_eigenvalue: d.sigma().min_nonzero_eigenvalue(),
        block_min_eigenvalues,
    })
}

/// `supp ρ_k ⊆ supp σ_k` for every block with `p_k > 0`.
pub fn support_lemma_check(rho: &DensityOperator, d: &OrthogonalDecomposition) -> Result<bool> {
    let b = theorem1_breakdown(rho, d)?;
    let tol = d.tolerances();
    Ok(b.conditional_states.iter().zip(d.parts()).all(|(rho_k, sigma_k)| match (rho_k, sigma_k) {
        (None, _) => true,
        (Some(r), Some(s)) => support_contained(r, s, tol),
        (Some(_), None) => false,
    }))
}

/// `H(p‖w)` next to `S(Σ p_k |k⟩⟨k| ‖ Σ w_k |k⟩⟨k|)` for orthonormal
/// columns `|k⟩` of `basis`.
pub fn classical_embedding_check(
    p: &ProbabilityVector,
    w: &ProbabilityVector,
    basis: &CMatrix,
    tol: &Tolerances,
) -> Result<(ExtendedReal, ExtendedReal)> {
    if p.len() != w.len() {
        return Err(Error::LengthMismatch(p.len(), w.len()));
    }
    if basis.ncols() != p.len() {
        return Err(Error::LengthMismatch(p.len(), basis.ncols()));
    }
    let k = basis.ncols();
    let defect = (basis.adjoint() * basis - CMatrix::identity(k, k)).norm();
    if defect > tol.orth {
        return Err(Error::NotOrthonormal(defect));
    }
    let classical = classical_relative_entropy(p, w)?;
    let rho = DensityOperator::from_ensemble(p.as_slice(), basis, tol)?;
    let sigma = DensityOperator::from_ensemble(w.as_slice(), basis, tol)?;
    let quantum = quantum_relative_entropy(&rho, &sigma)?;
    Ok((classical, quantum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::from_diagonal(p, &tol()).unwrap()
    }

    #[test]
    fn single_block_decomposition() {
        let sigma = diag(&[0.2, 0.3, 0.5]);
        let d = decompose_by_projectors(&sigma, &[Projector::identity(3)]).unwrap();
        assert_eq!(d.weights().as_slice(), &[1.0]);
        assert!(d.parts()[0].as_ref().unwrap().distance(&sigma) < 1e-15);
        assert!(lemma1_log_decomposition(&d).distance(sigma.extended_log().as_matrix()) < 1e-14);
        let m = entropy_mixing_identity(&d);
        assert_abs_diff_eq!(m.lhs, von_neumann_entropy(&sigma), epsilon = 1e-15);
        assert!(m.residual() < 1e-14);
    }

    #[test]
    fn three_by_three_block_split() {
        let sigma = diag(&[0.5, 0.25, 0.25]);
        let blocks = [Projector::coordinate(3, [0]), Projector::coordinate(3, [1, 2])];
        let d = decompose_by_projectors(&sigma, &blocks).unwrap();
        assert_abs_diff_eq!(d.weights().as_slice()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.weights().as_slice()[1], 0.5, epsilon = 1e-15);
        assert!(d.parts()[0].as_ref().unwrap().distance(&diag(&[1.0, 0.0, 0.0])) < 1e-15);
        assert!(d.parts()[1].as_ref().unwrap().distance(&diag(&[0.0, 0.5, 0.5])) < 1e-15);
        assert_eq!(d.supports()[1].rank(), 2);
    }

    #[test]
    fn zero_weight_block() {
        let sigma = diag(&[1.0, 0.0]);
        let blocks = [Projector::coordinate(2, [0]), Projector::coordinate(2, [1])];
        let d = decompose_by_projectors(&sigma, &blocks).unwrap();
        assert_eq!(d.weights().as_slice(), &[1.0, 0.0]);
        assert!(d.parts()[1].is_none());
        assert_eq!(d.supports()[1].rank(), 0);
        assert!(d.supports()[1].as_matrix().norm() == 0.0);
    }

    #[test]
    fn decomposition_errors() {
        let sigma = diag(&[0.5, 0.5]);
        let leaky = [Projector::coordinate(2, [0])];
        assert!(matches!(decompose_by_projectors(&sigma, &leaky), Err(Error::LeakedSupport(_))));
        let overlapping = [Projector::identity(2), Projector::coordinate(2, [0])];
        assert!(matches!(decompose_by_projectors(&sigma, &overlapping), Err(Error::NotOrthogonal(..))));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityOperator::pure(&nalgebra::DVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]), &tol()).unwrap();
        let z = [Projector::coordinate(2, [0]), Projector::coordinate(2, [1])];
        assert!(matches!(decompose_by_projectors(&plus, &z), Err(Error::NotBlockDiagonal(_))));
    }

    #[test]
    fn lemma1_two_pure_blocks() {
        let sigma = diag(&[0.5, 0.5]);
        let blocks = [Projector::coordinate(2, [0]), Projector::coordinate(2, [1])];
        let d = decompose_by_projectors(&sigma, &blocks).unwrap();
        let l = lemma1_log_decomposition(&d);
        assert!(l.distance(HermitianMatrix::from_real_diagonal(&[-LN_2, -LN_2]).as_matrix()) < 1e-15);
        let padded = d.with_zero_part();
        assert_eq!(lemma1_log_decomposition(&padded), l);
    }

    #[test]
    fn mixing_identity_maximally_mixed_blocks() {
        let sigma = DensityOperator::maximally_mixed(4, &tol()).unwrap();
        let blocks = [Projector::coordinate(4, [0, 1]), Projector::coordinate(4, [2, 3])];
        let d = decompose_by_projectors(&sigma, &blocks).unwrap();
        let m = entropy_mixing_identity(&d);
        assert_abs_diff_eq!(m.lhs, 4f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(m.rhs, LN_2 + LN_2, epsilon = 1e-14);
    }

    #[test]
    fn breakdown_self_distance() {
        let sigma = diag(&[0.1, 0.2, 0.3, 0.4]);
        let blocks = [Projector::coordinate(4, [0, 1]), Projector::coordinate(4, [2, 3])];
        let d = decompose_by_projectors(&sigma, &blocks).unwrap();
        let b = theorem1_breakdown(&sigma, &d).unwrap();
        assert_abs_diff_eq!(b.s_pinched, b.s_rho, epsilon = 1e-14);
        assert_abs_diff_eq!(b.h_rel.finite().unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.avg_rel.finite().unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.total_lhs.finite().unwrap(), 0.0, epsilon = 1e-14);
        assert!(b.residual.unwrap() < 1e-14);
        assert!(support_lemma_check(&sigma, &d).unwrap());
    }

    #[test]
    fn breakdown_classical_case() {
        let p = [0.1, 0.6, 0.3];
        let w = [0.3, 0.3, 0.4];
        let rho = diag(&p);
        let sigma = diag(&w);
        let blocks: Vec<_> = (0..3).map(|i| Projector::coordinate(3, [i])).collect();
        let d = decompose_by_projectors(&sigma, &blocks).unwrap();
        let b = theorem1_breakdown(&rho, &d).unwrap();
        // H(p‖w) by hand
        let expected: f64 = p.iter().zip(&w).map(|(a, b)| a * (a / b).ln()).sum();
        assert_abs_diff_eq!(b.h_rel.finite().unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(b.s_pinched - b.s_rho, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.avg_rel.finite().unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.total_lhs.finite().unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn breakdown_support_violation() {
        let rho = diag(&[0.5, 0.5, 0.0]);
        let sigma = diag(&[0.4, 0.0, 0.6]);
        let blocks = [Projector::coordinate(3, [0, 1]), Projector::coordinate(3, [2])];
        let d = decompose_by_projectors(&sigma, &blocks).unwrap();
        let b = theorem1_breakdown(&rho, &d).unwrap();
        assert!(b.total_lhs.is_infinite());
        assert!(b.total_rhs.is_infinite());
        assert_eq!(b.residual, Some(0.0));
        assert_abs_diff_eq!(b.leakage, 0.5, epsilon = 1e-15);
        assert!(b.h_rel.is_finite());
        assert!(b.avg_rel.is_finite());
    }

    #[test]
    fn support_lemma_single_surviving_block() {
        let sigma = diag(&[0.25, 0.25, 0.25, 0.25]);
        let blocks = [Projector::coordinate(4, [0, 1]), Projector::coordinate(4, [2, 3])];
        let d = decompose_by_projectors(&sigma, &blocks).unwrap();
        let rho = diag(&[0.7, 0.3, 0.0, 0.0]);
        assert!(support_lemma_check(&rho, &d).unwrap());
        let b = theorem1_breakdown(&rho, &d).unwrap();
        assert_eq!(b.conditional_states.iter().filter(|s| s.is_some()).count(), 1);
    }

    #[test]
    fn classical_embedding_examples() {
        let t = tol();
        let id = CMatrix::identity(2, 2);
        let p = ProbabilityVector::new(vec![0.3, 0.7], &t).unwrap();
        let (c, q) = classical_embedding_check(&p, &p, &id, &t).unwrap();
        assert_eq!(c, ExtendedReal::Finite(0.0));
        assert_abs_diff_eq!(q.finite().unwrap(), 0.0, epsilon = 1e-15);

        let p = ProbabilityVector::new(vec![1.0, 0.0], &t).unwrap();
        let w = ProbabilityVector::uniform(2, &t).unwrap();
        let (c, q) = classical_embedding_check(&p, &w, &id, &t).unwrap();
        assert_abs_diff_eq!(c.finite().unwrap(), LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(q.finite().unwrap(), LN_2, epsilon = 1e-15);

        let (c, q) = classical_embedding_check(&w, &p, &id, &t).unwrap();
        assert!(c.is_infinite() && q.is_infinite());

        let skew = CMatrix::from_fn(2, 2, |i, j| C64::new(if i == j { 1.0 } else { 0.5 }, 0.0));
        assert!(matches!(classical_embedding_check(&p, &w, &skew, &t), Err(Error::NotOrthonormal(_))));
    }
}
