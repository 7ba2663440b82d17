//! Seeded random fixtures: Ginibre states, Haar unitaries, block projector
//! families, refinements and orthogonal decompositions.
//!
//! The generator is ChaCha8 seeded through `seed_from_u64`. Independent
//! streams come from [`derive_seed`], a SplitMix64 fold of the master seed
//! with the stream coordinates (identity tag, dimension, trial index), so a
//! trial's fixtures do not depend on how many trials ran before it or on
//! which thread ran it.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::entropy::ProbabilityVector;
use crate::error::{Error, Result};
use crate::linop::{CMatrix, DensityOperator, HermitianMatrix, Projector, Tolerances, C64};
use crate::lueders::{ProjectiveObservable, RefinementPair};
use crate::mixing::OrthogonalDecomposition;

/// Parameters of one generated fixture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub dim: usize,
    pub rank: usize,
    pub seed: u64,
    pub block_sizes: Vec<usize>,
}

impl GenSpec {
    /// Full rank, single block.
    pub fn new(dim: usize, seed: u64) -> Self {
        Self { dim, rank: dim, seed, block_sizes: vec![dim] }
    }

    pub fn with_rank(mut self, rank: usize) -> Self {
        self.rank = rank;
        self
    }

    pub fn with_blocks(mut self, sizes: &[usize]) -> Self {
        self.block_sizes = sizes.to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::BadSpec("dim must be positive".into()));
        }
        if self.rank == 0 || self.rank > self.dim {
            return Err(Error::BadSpec(format!("rank {} outside [1, {}]", self.rank, self.dim)));
        }
        if self.block_sizes.contains(&0) {
            return Err(Error::BadSpec("block sizes must be positive".into()));
        }
        if self.block_sizes.iter().sum::<usize>() > self.dim {
            return Err(Error::BadSpec(format!("block sizes {:?} exceed dim {}", self.block_sizes, self.dim)));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `h = splitmix64(master)`, then `h = splitmix64(h ^ c)` for each stream
/// coordinate `c`.
pub fn derive_seed(master: u64, stream: &[u64]) -> u64 {
    stream.iter().fold(splitmix64(master), |h, &c| splitmix64(h ^ c))
}

/// How a coarse projector is split when building a refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineMode {
    RankOne,
    RandomSizes,
}

/// A state with a prescribed degenerate spectrum and the eigenbasis used to
/// build it.
#[derive(Debug, Clone)]
pub struct DegenerateState {
    pub state: DensityOperator,
    pub basis: CMatrix,
    /// Column indices of `basis` sharing one eigenvalue.
    pub levels: Vec<Vec<usize>>,
}

/// Seeded source of random fixtures.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    /// Entries `(x + iy)/√2` with `x, y` standard normal.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DMatrix::from_fn(rows, cols, |_, _| {
            let re: f64 = StandardNormal.sample(&mut self.rng);
            let im: f64 = StandardNormal.sample(&mut self.rng);
            C64::new(re * s, im * s)
        })
    }

    /// Haar unitary: QR of a Ginibre matrix, columns rephased by
    /// `R_ii / |R_ii|`.
    pub fn unitary(&mut self, dim: usize) -> CMatrix {
        let qr = self.ginibre(dim, dim).qr();
        let mut q = qr.q();
        let r = qr.r();
        for i in 0..dim {
            let rii = r[(i, i)];
            let phase = if rii.norm() > 0.0 { rii / rii.norm() } else { C64::new(1.0, 0.0) };
            for j in 0..dim {
                q[(j, i)] *= phase;
            }
        }
        q
    }

    /// `G G† / tr(G G†)` with `G` a `dim × rank` Ginibre matrix.
    pub fn density(&mut self, dim: usize, rank: usize, tol: &Tolerances) -> Result<DensityOperator> {
        GenSpec::new(dim, 0).with_rank(rank).validate()?;
        let g = self.ginibre(dim, rank);
        gram_state(&g, tol)
    }

    /// A random state of the given rank supported inside `range(P)`.
    pub fn state_in_support(&mut self, p: &Projector, rank: usize, tol: &Tolerances) -> Result<DensityOperator> {
        if rank == 0 || rank > p.rank() {
            return Err(Error::BadSpec(format!("rank {rank} outside [1, {}]", p.rank())));
        }
        let basis = p.range_basis()?;
        let g = &basis * self.ginibre(p.rank(), rank);
        gram_state(&g, tol)
    }

    /// `(1 − leak) ρ_in + leak τ` where `ρ_in` lives in `range(P)` and `τ`
    /// is a pure state in its orthocomplement, so exactly `leak` of the mass
    /// sits outside `P`.
    pub fn leaky_state(&mut self, p: &Projector, rank: usize, leak: f64, tol: &Tolerances) -> Result<DensityOperator> {
        let d = p.dim();
        if p.rank() >= d {
            return Err(Error::BadSpec("projector has no orthocomplement".into()));
        }
        let inside = self.state_in_support(p, rank, tol)?;
        let complement = Projector::from_orthonormal_columns(&complement_basis(p)?);
        let outside = self.state_in_support(&complement, 1, tol)?;
        let m = inside.as_matrix() * C64::new(1.0 - leak, 0.0) + outside.as_matrix() * C64::new(leak, 0.0);
        DensityOperator::from_hermitian(HermitianMatrix::symmetrized(m), tol)
    }

    /// Orthogonal projectors from column groups of a Haar unitary, padded
    /// with a remainder block when the sizes do not fill `dim`.
    pub fn block_projectors(&mut self, dim: usize, sizes: &[usize]) -> Result<Vec<Projector>> {
        GenSpec::new(dim, 0).with_blocks(sizes).validate()?;
        let u = self.unitary(dim);
        let mut sizes = sizes.to_vec();
        let used: usize = sizes.iter().sum();
        if used < dim {
            sizes.push(dim - used);
        }
        let mut start = 0;
        Ok(sizes
            .into_iter()
            .map(|s| {
                let p = Projector::from_orthonormal_columns(&u.columns(start, s).into_owned());
                start += s;
                p
            })
            .collect())
    }

    /// Random composition of `n` into `parts` positive integers.
    pub fn composition(&mut self, n: usize, parts: usize) -> Vec<usize> {
        assert!(parts >= 1 && parts <= n);
        let mut cuts: Vec<usize> = sample(&mut self.rng, n - 1, parts - 1).into_iter().map(|c| c + 1).collect();
        cuts.sort_unstable();
        let mut out = Vec::with_capacity(parts);
        let mut prev = 0;
        for c in cuts.into_iter().chain(std::iter::once(n)) {
            out.push(c - prev);
            prev = c;
        }
        out
    }

    /// Splits each coarse projector (or only those listed in `split`) into
    /// random orthogonal subprojectors.
    pub fn refinement(
        &mut self,
        coarse: &[Projector],
        mode: RefineMode,
        split: Option<&[usize]>,
        tol: &Tolerances,
    ) -> Result<RefinementPair> {
        let mut fine = Vec::new();
        for (k, p) in coarse.iter().enumerate() {
            if p.rank() == 0 {
                continue;
            }
            if split.is_some_and(|s| !s.contains(&k)) {
                fine.push(p.clone());
                continue;
            }
            let basis = p.range_basis()?;
            let rotated = &basis * self.unitary(p.rank());
            let sizes = match mode {
                RefineMode::RankOne => vec![1; p.rank()],
                RefineMode::RandomSizes => {
                    let parts = self.range(1, p.rank());
                    self.composition(p.rank(), parts)
                }
            };
            let mut start = 0;
            for s in sizes {
                fine.push(Projector::from_orthonormal_columns(&rotated.columns(start, s).into_owned()));
                start += s;
            }
        }
        let coarse = ProjectiveObservable::from_projectors(coarse.to_vec(), tol)?;
        let fine = ProjectiveObservable::from_projectors(fine, tol)?;
        RefinementPair::new(coarse, fine, tol)
    }

    /// Probability vector of length `k` with `zeros` entries forced to zero
    /// (at least one entry stays positive).
    pub fn probability(&mut self, k: usize, zeros: usize, tol: &Tolerances) -> Result<ProbabilityVector> {
        if k == 0 || zeros >= k {
            return Err(Error::BadSpec(format!("cannot zero {zeros} of {k} entries")));
        }
        let zeroed: Vec<usize> = sample(&mut self.rng, k, zeros).into_vec();
        let mut p: Vec<f64> = (0..k)
            .map(|i| if zeroed.contains(&i) { 0.0 } else { Exp1.sample(&mut self.rng) })
            .collect();
        let total: f64 = p.iter().sum();
        for x in p.iter_mut() {
            *x /= total;
        }
        ProbabilityVector::new(p, tol)
    }

    /// Random orthogonal decomposition over Haar-random blocks of the given
    /// sizes. Each part has a random rank up to its block size (full rank
    /// unless `deficient`), and `zero_weights` blocks get weight zero.
    pub fn decomposition(
        &mut self,
        dim: usize,
        sizes: &[usize],
        deficient: bool,
        zero_weights: usize,
        tol: &Tolerances,
    ) -> Result<OrthogonalDecomposition> {
        let blocks = self.block_projectors(dim, sizes)?;
        let weights = self.probability(blocks.len(), zero_weights, tol)?;
        let mut parts = Vec::with_capacity(blocks.len());
        for (b, &w) in blocks.iter().zip(weights.as_slice()) {
            if w == 0.0 {
                parts.push(None);
                continue;
            }
            let rank = if deficient { self.range(1, b.rank()) } else { b.rank() };
            parts.push(Some(self.state_in_support(b, rank, tol)?));
        }
        OrthogonalDecomposition::new(weights.as_slice().to_vec(), parts, tol)
    }

    /// State `U diag(w) U†` whose eigenvalues come in `levels.len()` distinct
    /// values, level `i` repeated `levels[i]` times.
    pub fn degenerate_density(&mut self, multiplicities: &[usize], tol: &Tolerances) -> Result<DegenerateState> {
        let dim: usize = multiplicities.iter().sum();
        if dim == 0 || multiplicities.contains(&0) {
            return Err(Error::BadSpec("multiplicities must be positive".into()));
        }
        // distinct, well separated levels
        let mut values: Vec<f64> = (0..multiplicities.len()).map(|i| 1.0 + i as f64 + self.rng.random::<f64>() * 0.5).collect();
        let total: f64 = values.iter().zip(multiplicities).map(|(v, &m)| v * m as f64).sum();
        for v in values.iter_mut() {
            *v /= total;
        }
        let basis = self.unitary(dim);
        let mut diag = Vec::with_capacity(dim);
        let mut levels = Vec::with_capacity(multiplicities.len());
        for (v, &m) in values.iter().zip(multiplicities) {
            levels.push((diag.len()..diag.len() + m).collect());
            diag.extend(std::iter::repeat_n(*v, m));
        }
        let state = DensityOperator::from_ensemble(&diag, &basis, tol)?;
        Ok(DegenerateState { state, basis, levels })
    }
}

impl DegenerateState {
    /// Another eigenbasis of the same state: each degenerate level's columns
    /// are mixed by an independent Haar unitary.
    pub fn alternative_basis(&self, sampler: &mut Sampler) -> CMatrix {
        let mut out = self.basis.clone();
        for level in &self.levels {
            let cols = CMatrix::from_columns(&level.iter().map(|&i| self.basis.column(i).into_owned()).collect::<Vec<_>>());
            let mixed = cols * sampler.unitary(level.len());
            for (j, &i) in level.iter().enumerate() {
                out.set_column(i, &mixed.column(j));
            }
        }
        out
    }
}

fn gram_state(g: &CMatrix, tol: &Tolerances) -> Result<DensityOperator> {
    let m = g * g.adjoint();
    let tr: f64 = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
    DensityOperator::from_hermitian(HermitianMatrix::symmetrized(m * C64::new(1.0 / tr, 0.0)), tol)
}

/// Orthonormal basis of `range(I − P)`.
pub fn complement_basis(p: &Projector) -> Result<CMatrix> {
    let d = p.dim();
    let m = CMatrix::identity(d, d) - p.as_matrix();
    let spec = HermitianMatrix::symmetrized(m).eigh()?;
    let k = d - p.rank();
    let cols: Vec<_> = (d - k..d).map(|i| spec.eigenvectors().column(i).into_owned()).collect();
    Ok(if cols.is_empty() { CMatrix::zeros(d, 0) } else { CMatrix::from_columns(&cols) })
}

/// Ginibre state of `spec.rank` in dimension `spec.dim`.
pub fn random_density(spec: &GenSpec, tol: &Tolerances) -> Result<DensityOperator> {
    spec.validate()?;
    Sampler::new(spec.seed).density(spec.dim, spec.rank, tol)
}

/// Haar-random block projectors of `spec.block_sizes`, padded to resolve
/// the identity.
pub fn random_block_projectors(spec: &GenSpec) -> Result<Vec<Projector>> {
    spec.validate()?;
    Sampler::new(spec.seed).block_projectors(spec.dim, &spec.block_sizes)
}

/// Rank-one refinement of `coarse`.
pub fn random_refinement(coarse: &[Projector], seed: u64, tol: &Tolerances) -> Result<RefinementPair> {
    Sampler::new(seed).refinement(coarse, RefineMode::RankOne, None, tol)
}

pub fn random_state_in_support(p: &Projector, rank: usize, seed: u64, tol: &Tolerances) -> Result<DensityOperator> {
    Sampler::new(seed).state_in_support(p, rank, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::von_neumann_entropy;
    use crate::linop::support_contained;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn pure_and_full_rank_states() {
        let pure = random_density(&GenSpec::new(5, 3).with_rank(1), &tol()).unwrap();
        assert!(von_neumann_entropy(&pure) < 1e-12);
        assert_eq!(pure.rank(), 1);
        let qubit = random_density(&GenSpec::new(2, 11), &tol()).unwrap();
        assert!(qubit.spectrum().eigenvalues().iter().all(|&l| l > 0.0 && l < 1.0));
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let spec = GenSpec::new(6, 42).with_rank(3);
        let a = random_density(&spec, &tol()).unwrap();
        let b = random_density(&spec, &tol()).unwrap();
        assert_eq!(a.as_matrix(), b.as_matrix());
        let c = random_density(&GenSpec::new(6, 43).with_rank(3), &tol()).unwrap();
        assert_ne!(a.as_matrix(), c.as_matrix());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let u = Sampler::new(9).unitary(7);
        assert!((u.adjoint() * &u - CMatrix::identity(7, 7)).norm() < 1e-12);
    }

    #[test]
    fn block_projector_families() {
        let whole = random_block_projectors(&GenSpec::new(4, 1).with_blocks(&[4])).unwrap();
        assert_eq!(whole.len(), 1);
        assert!((whole[0].as_matrix() - CMatrix::identity(4, 4)).norm() < 1e-12);
        let ones = random_block_projectors(&GenSpec::new(3, 1).with_blocks(&[1, 1, 1])).unwrap();
        assert!(ones.iter().all(|p| p.rank() == 1));
        let two_three = random_block_projectors(&GenSpec::new(5, 7).with_blocks(&[2, 3])).unwrap();
        assert_eq!(two_three.iter().map(Projector::rank).collect::<Vec<_>>(), vec![2, 3]);
        assert!((two_three[0].as_matrix() * two_three[1].as_matrix()).norm() < 1e-12);
        for p in &two_three {
            let m = p.as_matrix();
            assert!((m * m - m).norm() < 1e-12);
            assert!((p.matrix().trace() - p.rank() as f64).abs() < 1e-12);
        }
        let padded = random_block_projectors(&GenSpec::new(5, 7).with_blocks(&[2])).unwrap();
        assert_eq!(padded.iter().map(Projector::rank).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn bad_specs() {
        assert!(random_density(&GenSpec::new(3, 0).with_rank(4), &tol()).is_err());
        assert!(random_density(&GenSpec::new(3, 0).with_rank(0), &tol()).is_err());
        assert!(random_block_projectors(&GenSpec::new(3, 0).with_blocks(&[2, 2])).is_err());
        assert!(random_block_projectors(&GenSpec::new(3, 0).with_blocks(&[0, 2])).is_err());
    }

    #[test]
    fn refinements() {
        let t = tol();
        let pair = random_refinement(&[Projector::identity(3)], 5, &t).unwrap();
        assert_eq!(pair.fine().len(), 3);
        let coarse = random_block_projectors(&GenSpec::new(4, 2).with_blocks(&[2, 2])).unwrap();
        let pair = random_refinement(&coarse, 8, &t).unwrap();
        assert_eq!(pair.grouping(), &[0, 0, 1, 1]);
        let again = random_refinement(&coarse, 8, &t).unwrap();
        assert_eq!(pair.fine().projectors()[2].as_matrix(), again.fine().projectors()[2].as_matrix());
        let mut s = Sampler::new(3);
        let partial = s.refinement(&coarse, RefineMode::RandomSizes, Some(&[1]), &t).unwrap();
        assert_eq!(partial.grouping()[0], 0);
        assert_eq!(partial.fine().projectors()[0].rank(), 2);
    }

    #[test]
    fn states_in_support() {
        let t = tol();
        let same = random_state_in_support(&Projector::identity(3), 3, 4, &t).unwrap();
        assert_eq!(same.rank(), 3);
        let line = Projector::coordinate(3, [1]);
        let pure = random_state_in_support(&line, 1, 4, &t).unwrap();
        assert!(pure.distance(&DensityOperator::from_diagonal(&[0.0, 1.0, 0.0], &t).unwrap()) < 1e-12);
        let blocks = random_block_projectors(&GenSpec::new(5, 1).with_blocks(&[3])).unwrap();
        let rho = random_state_in_support(&blocks[0], 2, 6, &t).unwrap();
        let sigma = random_state_in_support(&blocks[0], 3, 7, &t).unwrap();
        assert!(support_contained(&rho, &sigma, &t));
        assert!(random_state_in_support(&blocks[0], 4, 6, &t).is_err());
    }

    #[test]
    fn leaky_states_leak_exactly() {
        let t = tol();
        let mut s = Sampler::new(12);
        let blocks = s.block_projectors(4, &[2]).unwrap();
        let sigma = s.state_in_support(&blocks[0], 2, &t).unwrap();
        let rho = s.leaky_state(&blocks[0], 2, 1e-3, &t).unwrap();
        let leak = crate::linop::leakage_mass(&rho, &sigma, &t);
        assert!((leak - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn degenerate_bases() {
        let t = tol();
        let mut s = Sampler::new(21);
        let deg = s.degenerate_density(&[2, 1, 3], &t).unwrap();
        assert_eq!(deg.state.dim(), 6);
        let alt = deg.alternative_basis(&mut s);
        let rotated = alt.adjoint() * deg.state.as_matrix() * &alt;
        let mut off = rotated.clone();
        off.fill_diagonal(C64::new(0.0, 0.0));
        assert!(off.norm() < 1e-12);
        assert!((&alt - &deg.basis).norm() > 1e-3);
    }

    #[test]
    fn compositions_sum() {
        let mut s = Sampler::new(0);
        for _ in 0..50 {
            let n = s.range(1, 9);
            let k = s.range(1, n);
            let c = s.composition(n, k);
            assert_eq!(c.len(), k);
            assert_eq!(c.iter().sum::<usize>(), n);
            assert!(c.iter().all(|&x| x >= 1));
        }
    }

    #[test]
    fn derived_seeds_differ_per_stream() {
        assert_eq!(derive_seed(1, &[2, 3]), derive_seed(1, &[2, 3]));
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(2, &[2, 3]));
    }
}
