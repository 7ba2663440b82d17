//! Quantum relative entropy with exact support handling, and numerical
//! checks of how it decomposes under orthogonal mixtures, ideal
//! measurements and dephasing.
//!
//! `S(ρ‖σ) = tr ρ(log ρ − log σ)` is finite only when the support of `ρ`
//! lies inside the support of `σ`; otherwise it is `+∞`. Logarithms are
//! taken on the support of their argument, and an eigenvalue counts as zero
//! when it is at most `tol.rank` times the largest one. All thresholds live
//! in [`linop::Tolerances`].
//!
//! ## Modules
//!
//! - [`linop`]: Hermitian matrices, density operators, projectors, spectral
//!   decompositions, support projectors, pinching.
//! - [`entropy`]: von Neumann, Shannon and relative entropies returning
//!   [`entropy::ExtendedReal`].
//! - [`mixing`]: orthogonal decompositions `σ = Σ w_k σ_k` and the
//!   term-by-term breakdown of `S(ρ‖σ)` over them.
//! - [`lueders`]: projective observables, post-measurement states,
//!   refinements and dephasing in an eigenbasis of `σ`.
//! - [`stategen`]: seeded random states, unitaries, block structures and
//!   refinements.
//! - [`cli`]: the `relent` binary (`compute`, `verify`, `breakdown`) and the
//!   verification campaigns behind it.
//!
//! ## Examples
//!
//! ```text
//! examples/
//! ├── relative_entropy.rs     # S(ρ‖σ), including the +∞ case
//! ├── extended_log.rs         # log σ split over orthogonal blocks
//! ├── mixing_breakdown.rs     # S(ρ‖σ) split over a block decomposition of σ
//! ├── lueders_measurement.rs  # entropy gain of an ideal measurement
//! ├── refinement_line.rs      # coarse then fine measurement
//! ├── classical_embedding.rs  # diagonal states and classical relative entropy
//! ├── dephasing_line.rs       # dephasing in (degenerate) eigenbases of σ
//! └── verify_campaign.rs      # seeded randomized verification in-process
//! ```
//!
//! ```bash
//! cargo run -p relent --example mixing_breakdown
//! cargo run -p relent --example verify_campaign -- theorem2
//! ```
//!
//! ## Quick start
//!
//! ```
//! use relent::entropy::quantum_relative_entropy;
//! use relent::linop::{DensityOperator, Tolerances};
//!
//! let tol = Tolerances::default();
//! let rho = DensityOperator::from_diagonal(&[1.0, 0.0], &tol).unwrap();
//! let sigma = DensityOperator::maximally_mixed(2, &tol).unwrap();
//! let s = quantum_relative_entropy(&rho, &sigma).unwrap().finite().unwrap();
//! assert!((s - std::f64::consts::LN_2).abs() < 1e-12);
//! assert!(quantum_relative_entropy(&sigma, &rho).unwrap().is_infinite());
//! ```

pub mod cli;
pub mod entropy;
pub mod error;
pub mod linop;
pub mod lueders;
pub mod mixing;
pub mod stategen;
