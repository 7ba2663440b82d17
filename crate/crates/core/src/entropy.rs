//! Entropy functionals in nats.
//!
//! Relative entropies return [`ExtendedReal`]: the support condition is
//! checked first and a violation yields [`ExtendedReal::Infinite`] without
//! ever evaluating `log(0)`.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linop::{compensated_sum, support_contained, DensityOperator, Tolerances};

/// A finite real or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub const ZERO: Self = Self::Finite(0.0);

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Self::Finite(x) => Some(x),
            Self::Infinite => None,
        }
    }

    /// Scales a finite value; `+∞` stays `+∞` for positive factors and
    /// `0 · ∞ = 0`.
    pub fn scale(self, factor: f64) -> Self {
        match self {
            Self::Finite(x) => Self::Finite(x * factor),
            Self::Infinite if factor == 0.0 => Self::ZERO,
            Self::Infinite => Self::Infinite,
        }
    }

    /// `|a − b|` when both are finite, `Some(0)` when both are infinite,
    /// `None` on a finite/infinite mismatch.
    pub fn residual(&self, other: &Self) -> Option<f64> {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => Some((a - b).abs()),
            (Self::Infinite, Self::Infinite) => Some(0.0),
            _ => None,
        }
    }
}

impl Add for ExtendedReal {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::Infinite,
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        Self::Finite(x)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => match f.precision() {
                Some(p) => write!(f, "{x:.p$}"),
                None => write!(f, "{x}"),
            },
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(x) => s.serialize_f64(*x),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(Self::Finite(x)),
            Repr::Str(s) if s == "inf" => Ok(Self::Infinite),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

/// A discrete probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
    zero: f64,
}

impl ProbabilityVector {
    /// Entries must be nonnegative (down to `-tol_psd`, then clamped) and
    /// sum to one within `tol_trace`. The result is renormalized.
    pub fn new(probs: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::BadProbability("empty".into()));
        }
        if let Some(&bad) = probs.iter().find(|p| !p.is_finite() || **p < -tol.psd) {
            return Err(Error::BadProbability(format!("entry {bad} is negative or not finite")));
        }
        let mut probs: Vec<f64> = probs.into_iter().map(|p| p.max(0.0)).collect();
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > tol.trace {
            return Err(Error::BadProbability(format!("sums to {total}")));
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        Ok(Self { probs, zero: tol.supp })
    }

    pub fn uniform(k: usize, tol: &Tolerances) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; k], tol)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Mass at or below which an entry counts as zero.
    pub fn zero_threshold(&self) -> f64 {
        self.zero
    }
}

/// `−Σ λ ln λ` over the support of `ρ`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    let s = -compensated_sum(rho.nonzero_eigenvalues().map(|l| l * l.ln()));
    s.max(0.0)
}

/// `tr[ρ log ρ] − tr[ρ log σ]` when `supp ρ ⊆ supp σ`, else `+∞`.
pub fn quantum_relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<ExtendedReal> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let tol = rho.tolerances();
    if !support_contained(rho, sigma, tol) {
        return Ok(ExtendedReal::Infinite);
    }
    let self_term = compensated_sum(rho.nonzero_eigenvalues().map(|l| l * l.ln()));
    // tr[ρ log^e σ] in the eigenbasis of σ
    let spec = sigma.spectrum();
    let weights = spec.diagonal_of(rho.as_matrix());
    let cross_term = compensated_sum(spec.support_indices(tol.rank).map(|n| weights[n] * spec.eigenvalues()[n].ln()));
    Ok(ExtendedReal::Finite(self_term - cross_term))
}

/// `−Σ p_k ln p_k` with `0 ln 0 = 0`.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    let s = -compensated_sum(p.as_slice().iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()));
    s.max(0.0)
}

/// `Σ p_k ln(p_k / w_k)`; `+∞` if some `p_k` is above the zero threshold
/// where `w_k` is not.
pub fn classical_relative_entropy(p: &ProbabilityVector, w: &ProbabilityVector) -> Result<ExtendedReal> {
    if p.len() != w.len() {
        return Err(Error::LengthMismatch(p.len(), w.len()));
    }
    let zero = p.zero_threshold();
    let mut terms = Vec::with_capacity(p.len());
    for (&pk, &wk) in p.as_slice().iter().zip(w.as_slice()) {
        if wk <= zero {
            if pk > zero {
                return Ok(ExtendedReal::Infinite);
            }
            if pk > 0.0 && wk > 0.0 {
                terms.push(pk * (pk / wk).ln());
            }
        } else if pk > 0.0 {
            terms.push(pk * (pk / wk).ln());
        }
    }
    Ok(ExtendedReal::Finite(compensated_sum(terms)))
}

pub fn nats_to_bits(x: f64) -> f64 {
    x / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::{CVector, C64};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::from_diagonal(p, &tol()).unwrap()
    }

    fn pv(p: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(p.to_vec(), &tol()).unwrap()
    }

    // Hand-evaluated −(3/4) ln(3/4) − (1/4) ln(1/4).
    fn h_three_quarters() -> f64 {
        -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln())
    }

    #[test]
    fn von_neumann_examples() {
        let psi = CVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        assert_abs_diff_eq!(von_neumann_entropy(&DensityOperator::pure(&psi, &tol()).unwrap()), 0.0, epsilon = 1e-14);
        let mixed = DensityOperator::maximally_mixed(5, &tol()).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&mixed), 5f64.ln(), epsilon = 1e-14);
        let s = von_neumann_entropy(&diag(&[0.75, 0.25]));
        assert_abs_diff_eq!(s, h_three_quarters(), epsilon = 1e-15);
        assert_abs_diff_eq!(s, 0.562335, epsilon = 1e-6);
    }

    #[test]
    fn relative_entropy_examples() {
        let pure0 = diag(&[1.0, 0.0]);
        let mixed = diag(&[0.5, 0.5]);
        assert_eq!(quantum_relative_entropy(&mixed, &mixed).unwrap(), ExtendedReal::Finite(0.0));
        let d = quantum_relative_entropy(&pure0, &mixed).unwrap().finite().unwrap();
        assert_abs_diff_eq!(d, LN_2, epsilon = 1e-15);
        assert_eq!(format!("{d:.6}"), "0.693147");
        assert_eq!(quantum_relative_entropy(&mixed, &pure0).unwrap(), ExtendedReal::Infinite);
        let big = diag(&[1.0, 0.0, 0.0]);
        assert_eq!(quantum_relative_entropy(&big, &mixed), Err(Error::DimensionMismatch(3, 2)));
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&pv(&[1.0, 0.0])), 0.0);
        assert_abs_diff_eq!(shannon_entropy(&pv(&[0.5, 0.5])), LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(shannon_entropy(&pv(&[0.75, 0.25])), h_three_quarters(), epsilon = 1e-15);
    }

    #[test]
    fn classical_relative_examples() {
        let p = pv(&[0.3, 0.7]);
        assert_eq!(classical_relative_entropy(&p, &p).unwrap(), ExtendedReal::Finite(0.0));
        let d = classical_relative_entropy(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5])).unwrap();
        assert_abs_diff_eq!(d.finite().unwrap(), LN_2, epsilon = 1e-15);
        assert_eq!(classical_relative_entropy(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0])).unwrap(), ExtendedReal::Infinite);
        assert_eq!(classical_relative_entropy(&pv(&[1.0]), &p), Err(Error::LengthMismatch(1, 2)));
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6], &tol()).is_err());
        assert!(ProbabilityVector::new(vec![1.5, -0.5], &tol()).is_err());
        assert!(ProbabilityVector::new(vec![], &tol()).is_err());
        let p = ProbabilityVector::new(vec![1.0 + 1e-12, -1e-12], &tol()).unwrap();
        assert_eq!(p.as_slice()[1], 0.0);
    }

    #[test]
    fn extended_real_arithmetic_and_serde() {
        let a = ExtendedReal::Finite(1.5);
        assert_eq!(a + ExtendedReal::Finite(2.0), ExtendedReal::Finite(3.5));
        assert_eq!(a + ExtendedReal::Infinite, ExtendedReal::Infinite);
        assert_eq!(ExtendedReal::Infinite.scale(0.0), ExtendedReal::ZERO);
        assert_eq!(a.residual(&ExtendedReal::Infinite), None);
        assert_eq!(ExtendedReal::Infinite.residual(&ExtendedReal::Infinite), Some(0.0));
        assert_eq!(format!("{:.3}", a), "1.500");
        assert_eq!(ExtendedReal::Infinite.to_string(), "inf");
        let json = serde_json::to_string(&[a, ExtendedReal::Infinite]).unwrap();
        assert_eq!(json, r#"[1.5,"inf"]"#);
        let back: Vec<ExtendedReal> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![a, ExtendedReal::Infinite]);
    }
}
