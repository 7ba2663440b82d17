//! Randomized verification campaigns, one trial generator per identity.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use super::report::{Identity, Report, Residual, TrialRecord, VerifyConfig};
use crate::entropy::{ExtendedReal, ProbabilityVector};
use crate::error::Result;
use crate::linop::{extended_log, CMatrix, Projector, Tolerances};
use crate::lueders::{corollary1_check, corollary2_check, dephase_in_eigenbasis, detectable_indices, straight_line, theorem2_check, theorem2_check_in_basis, LineReport, ProjectiveObservable};
use crate::mixing::{classical_embedding_check, entropy_mixing_identity, lemma1_log_decomposition, support_lemma_check, theorem1_breakdown, OrthogonalDecomposition};
use crate::stategen::{derive_seed, RefineMode, Sampler};

/// What one trial measured.
#[derive(Debug, Clone)]
struct Outcome {
    case: String,
    residual: Residual,
    sigma_min_eigenvalue: Option<f64>,
    block_min_eigenvalue: Option<f64>,
    leakage: Option<f64>,
    /// Side conditions that failed.
    violations: Vec<String>,
}

impl Outcome {
    fn new(case: String, residual: Residual) -> Self {
        Self { case, residual, sigma_min_eigenvalue: None, block_min_eigenvalue: None, leakage: None, violations: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: &str) {
        if !ok {
            self.violations.push(what.to_string());
        }
    }
}

/// Seed of trial `trial` at dimension `dim`.
pub fn trial_seed(cfg: &VerifyConfig, dim: usize, trial: usize) -> u64 {
    derive_seed(cfg.seed, &[cfg.identity.code(), dim as u64, trial as u64])
}

/// Runs every `(dim, trial)` pair, on `threads` worker threads (rayon's
/// default when `None`). Record order does not depend on scheduling.
pub fn run_campaign(cfg: &VerifyConfig, threads: Option<usize>) -> std::result::Result<Report, String> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg.dims.iter().flat_map(|&d| (0..cfg.trials).map(move |t| (d, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| e.to_string())?;
    let records = pool.install(|| jobs.par_iter().map(|&(dim, trial)| run_trial(cfg, dim, trial)).collect());
    Ok(Report::new(cfg.clone(), records))
}

pub fn run_trial(cfg: &VerifyConfig, dim: usize, trial: usize) -> TrialRecord {
    let seed = trial_seed(cfg, dim, trial);
    let mut s = Sampler::new(seed);
    let ctx = Ctx { cfg, dim, trial, tol: cfg.tol };
    let outcome = match cfg.identity {
        Identity::Lemma1 => lemma1(&ctx, &mut s),
        Identity::Eq3a => eq3a(&ctx, &mut s),
        Identity::Theorem1 => theorem1(&ctx, &mut s),
        Identity::Corollary1 => corollary1(&ctx, &mut s),
        Identity::Corollary2 => corollary2(&ctx, &mut s),
        Identity::Corollary3 => corollary3(&ctx, &mut s),
        Identity::Theorem2 => theorem2(&ctx, &mut s),
    };
    let base = TrialRecord {
        identity: cfg.identity,
        dim,
        trial,
        seed,
        case: String::new(),
        residual: Residual::Error,
        sigma_min_eigenvalue: None,
        block_min_eigenvalue: None,
        leakage: None,
        pass: false,
        note: None,
    };
    match outcome {
        Ok(o) => {
            let pass = o.residual.within(cfg.tol.identity) && o.violations.is_empty();
            TrialRecord {
                case: o.case,
                residual: o.residual,
                sigma_min_eigenvalue: o.sigma_min_eigenvalue,
                block_min_eigenvalue: o.block_min_eigenvalue,
                leakage: o.leakage,
                pass,
                note: (!o.violations.is_empty()).then(|| o.violations.join("; ")),
                ..base
            }
        }
        Err(e) => TrialRecord { note: Some(e.to_string()), ..base },
    }
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    dim: usize,
    trial: usize,
    tol: Tolerances,
}

impl Ctx<'_> {
    /// Cycles full, half and unit rank when singular cases are enabled.
    fn rank(&self) -> usize {
        if !self.cfg.include_singular {
            return self.dim;
        }
        match self.trial % 3 {
            0 => self.dim,
            1 => self.dim.div_ceil(2),
            _ => 1,
        }
    }

    fn singular(&self) -> bool {
        self.cfg.include_singular
    }

    /// Every fourth trial is a support-violating one when enabled.
    fn infinite(&self) -> bool {
        self.cfg.include_infinite && self.cfg.identity.has_infinite_branch() && self.trial % 4 == 3
    }
}

fn line_residual(line: &LineReport) -> Residual {
    match line.residual {
        Some(r) if line.d_total.is_finite() => Residual::Value(r),
        Some(_) => Residual::InfiniteConsistent,
        None => Residual::InfiniteMismatch,
    }
}

fn pair_residual(a: ExtendedReal, b: ExtendedReal) -> Residual {
    match (a, b) {
        (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) => Residual::Value((x - y).abs()),
        (ExtendedReal::Infinite, ExtendedReal::Infinite) => Residual::InfiniteConsistent,
        _ => Residual::InfiniteMismatch,
    }
}

fn worst(a: Residual, b: Residual) -> Residual {
    match (a, b) {
        (Residual::Error, _) | (_, Residual::Error) => Residual::Error,
        (Residual::InfiniteMismatch, _) | (_, Residual::InfiniteMismatch) => Residual::InfiniteMismatch,
        (Residual::Value(x), Residual::Value(y)) => Residual::Value(x.max(y)),
        (Residual::Value(x), _) | (_, Residual::Value(x)) => Residual::Value(x),
        _ => Residual::InfiniteConsistent,
    }
}

/// Two to four blocks (fewer when `dim` is small).
fn block_sizes(s: &mut Sampler, dim: usize) -> Vec<usize> {
    let k = s.range(2, dim.min(4));
    s.composition(dim, k)
}

fn random_decomposition(ctx: &Ctx, s: &mut Sampler, force_zero: bool) -> Result<(OrthogonalDecomposition, String)> {
    let sizes = block_sizes(s, ctx.dim);
    let deficient = ctx.singular() && s.coin(0.5);
    let zeros = if force_zero || (ctx.singular() && s.coin(0.5)) { s.range(1, sizes.len() - 1) } else { 0 };
    let d = s.decomposition(ctx.dim, &sizes, deficient, zeros, &ctx.tol)?;
    let case = format!("blocks={sizes:?} deficient={deficient} zero_weights={zeros}");
    Ok((d, case))
}

/// Sum of orthogonal projectors, as a projector.
fn projector_sum(projs: &[&Projector], tol: &Tolerances) -> Result<Projector> {
    let d = projs[0].dim();
    let m = projs.iter().fold(CMatrix::zeros(d, d), |acc, p| acc + p.as_matrix());
    Projector::new(m, tol)
}

/// Log-uniform in `[1e-3, 0.5]`.
fn leak_mass(s: &mut Sampler) -> f64 {
    let (lo, hi) = (1e-3f64.ln(), 0.5f64.ln());
    (lo + s.rng().random_range(0.0..1.0) * (hi - lo)).exp()
}

fn lemma1(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let (d, case) = random_decomposition(ctx, s, false)?;
    let direct = extended_log(d.sigma().matrix(), &ctx.tol)?;
    let residual = lemma1_log_decomposition(&d).distance(direct.as_matrix());
    let mut o = Outcome::new(case, Residual::Value(residual));
    o.sigma_min_eigenvalue = Some(d.sigma().min_nonzero_eigenvalue());
    Ok(o)
}

fn eq3a(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let (d, case) = random_decomposition(ctx, s, false)?;
    let m = entropy_mixing_identity(&d);
    let mut o = Outcome::new(case, Residual::Value(m.residual()));
    o.sigma_min_eigenvalue = Some(d.sigma().min_nonzero_eigenvalue());
    Ok(o)
}

fn theorem1(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let infinite = ctx.infinite();
    let (d, mut case) = random_decomposition(ctx, s, infinite)?;
    let support = d.sigma().support_projector();
    let rho = if infinite {
        let leak = leak_mass(s);
        case.push_str(&format!(" leak={leak:.3e}"));
        s.leaky_state(&support, ctx.rank().min(support.rank()), leak, &ctx.tol)?
    } else {
        let present: Vec<&Projector> = d.present().map(|(_, _, _, q)| q).collect();
        let target = if ctx.singular() && present.len() >= 2 && s.coin(1.0 / 3.0) {
            // confine ρ away from one block so that some p_k = 0
            let skip = s.index(present.len());
            case.push_str(&format!(" confined_without_block={skip}"));
            let kept: Vec<&Projector> = present.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, p)| *p).collect();
            projector_sum(&kept, &ctx.tol)?
        } else {
            support
        };
        s.state_in_support(&target, ctx.rank().min(target.rank()), &ctx.tol)?
    };
    case.push_str(&format!(" rank={}", rho.rank()));
    let b = theorem1_breakdown(&rho, &d)?;
    let mut o = Outcome::new(case, pair_residual(b.total_lhs, b.total_rhs));
    o.sigma_min_eigenvalue = Some(b.sigma_min_eigenvalue);
    o.block_min_eigenvalue = b.block_min_eigenvalues.iter().flatten().copied().reduce(f64::min);
    o.leakage = Some(b.leakage.max(0.0));
    o.check(b.total_lhs.is_infinite() == infinite, "support condition does not match construction");
    if b.total_lhs.is_finite() {
        o.check(support_lemma_check(&rho, &d)?, "conditional state leaks outside its block support");
    }
    Ok(o)
}

fn corollary1(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let rho = s.density(ctx.dim, ctx.rank(), &ctx.tol)?;
    let k = s.range(1, ctx.dim);
    let sizes = s.composition(ctx.dim, k);
    let a = ProjectiveObservable::from_projectors(s.block_projectors(ctx.dim, &sizes)?, &ctx.tol)?;
    let r = corollary1_check(&rho, &a)?;
    let residual = match r.residual() {
        Some(x) => Residual::Value(x),
        None => Residual::InfiniteMismatch,
    };
    let mut o = Outcome::new(format!("blocks={sizes:?} rank={}", rho.rank()), residual);
    o.leakage = Some(r.leakage);
    o.check(r.support_included, "rho is not supported inside its Lueders state");
    o.check(r.entropy_gain >= -ctx.tol.identity, "entropy decreased under measurement");
    Ok(o)
}

fn corollary2(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let k = s.range(1, ctx.dim - 1);
    let sizes = s.composition(ctx.dim, k);
    let coarse = s.block_projectors(ctx.dim, &sizes)?;
    let mut case = format!("coarse={sizes:?}");
    let rho = if ctx.singular() && coarse.len() >= 2 && s.coin(0.5) {
        let skip = s.index(coarse.len());
        case.push_str(&format!(" undetectable_block={skip}"));
        let kept: Vec<&Projector> = coarse.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, p)| p).collect();
        let target = projector_sum(&kept, &ctx.tol)?;
        s.state_in_support(&target, ctx.rank().min(target.rank()), &ctx.tol)?
    } else {
        s.density(ctx.dim, ctx.rank(), &ctx.tol)?
    };
    let a = ProjectiveObservable::from_projectors(coarse.clone(), &ctx.tol)?;
    let detectable = detectable_indices(&rho, &a)?;
    let mode = if s.coin(0.5) { RefineMode::RankOne } else { RefineMode::RandomSizes };
    let pair = s.refinement(&coarse, mode, Some(&detectable), &ctx.tol)?;
    case.push_str(&format!(" fine={} rank={}", pair.fine().len(), rho.rank()));
    let r = corollary2_check(&rho, &pair)?;
    let residual = worst(line_residual(&r.line), Residual::Value(r.composition_defect));
    Ok(Outcome::new(case, residual))
}

fn corollary3(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let k = ctx.dim;
    let infinite = ctx.infinite();
    let w_zeros = if infinite { s.range(1, k - 1) } else if ctx.singular() { s.range(0, k - 1) } else { 0 };
    let w = s.probability(k, w_zeros, &ctx.tol)?;
    let w_null: Vec<usize> = (0..k).filter(|&i| w.as_slice()[i] == 0.0).collect();
    let mut p: Vec<f64> = (0..k).map(|_| Exp1.sample(s.rng())).collect();
    if infinite {
        // mass where w vanishes
        let keep = w_null[s.index(w_null.len())];
        for (i, x) in p.iter_mut().enumerate() {
            if w_null.contains(&i) && i != keep {
                *x = 0.0;
            }
        }
    } else {
        for &i in &w_null {
            p[i] = 0.0;
        }
        if ctx.singular() && s.coin(0.5) {
            let extra = s.index(k);
            if p.iter().enumerate().any(|(i, &x)| i != extra && x > 0.0) {
                p[extra] = 0.0;
            }
        }
    }
    let total: f64 = p.iter().sum();
    let p = ProbabilityVector::new(p.into_iter().map(|x| x / total).collect(), &ctx.tol)?;
    let basis = s.unitary(k);
    let (c, q) = classical_embedding_check(&p, &w, &basis, &ctx.tol)?;
    let mut o = Outcome::new(format!("w_zeros={w_zeros} infinite={infinite}"), pair_residual(c, q));
    o.check(c.is_infinite() == infinite, "support condition does not match construction");
    Ok(o)
}

fn theorem2(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let infinite = ctx.infinite();
    if !infinite && ctx.trial % 5 == 1 {
        return theorem2_degenerate(ctx, s);
    }
    let sigma_rank = if infinite {
        s.range(1, ctx.dim - 1)
    } else if ctx.singular() && s.coin(0.5) {
        s.range(1, ctx.dim)
    } else {
        ctx.dim
    };
    let sigma = s.density(ctx.dim, sigma_rank, &ctx.tol)?;
    let support = sigma.support_projector();
    let mut case = format!("sigma_rank={sigma_rank}");
    let rho = if infinite {
        let leak = leak_mass(s);
        case.push_str(&format!(" leak={leak:.3e}"));
        s.leaky_state(&support, ctx.rank().min(support.rank()), leak, &ctx.tol)?
    } else {
        s.state_in_support(&support, ctx.rank().min(support.rank()), &ctx.tol)?
    };
    case.push_str(&format!(" rank={}", rho.rank()));
    let mut o = if infinite {
        let gated = theorem2_check(&rho, &sigma);
        let middle = dephase_in_eigenbasis(&rho, &sigma, sigma.spectrum().eigenvectors())?;
        let line = straight_line(&rho, &middle, &sigma)?;
        let mut o = Outcome::new(case, line_residual(&line));
        o.check(gated.is_err(), "support violation was not reported");
        o.check(line.d_total.is_infinite(), "support condition does not match construction");
        o
    } else {
        let r = theorem2_check(&rho, &sigma)?;
        let mut o = Outcome::new(case, line_residual(&r.line));
        o.check(r.line.monotone(ctx.tol.identity), "dephasing increased the distance");
        o
    };
    o.sigma_min_eigenvalue = Some(sigma.min_nonzero_eigenvalue());
    o.leakage = Some(crate::linop::leakage_mass(&rho, &sigma, &ctx.tol));
    Ok(o)
}

/// Degenerate `σ`, checked in the solver's eigenbasis, the construction
/// basis and two further random eigenbases.
fn theorem2_degenerate(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let levels = s.range(1, ctx.dim - 1);
    let multiplicities = s.composition(ctx.dim, levels);
    let deg = s.degenerate_density(&multiplicities, &ctx.tol)?;
    let rho = s.density(ctx.dim, ctx.rank(), &ctx.tol)?;
    let alt1 = deg.alternative_basis(s);
    let alt2 = deg.alternative_basis(s);
    let bases: [&CMatrix; 4] = [deg.state.spectrum().eigenvectors(), &deg.basis, &alt1, &alt2];
    let mut residual = Residual::Value(0.0);
    let mut monotone = true;
    for basis in bases {
        let r = theorem2_check_in_basis(&rho, &deg.state, basis)?;
        residual = worst(residual, line_residual(&r.line));
        monotone &= r.line.monotone(ctx.tol.identity);
    }
    let mut o = Outcome::new(format!("degenerate={multiplicities:?} bases=4 rank={}", rho.rank()), residual);
    o.check(monotone, "dephasing increased the distance");
    o.sigma_min_eigenvalue = Some(deg.state.min_nonzero_eigenvalue());
    o.leakage = Some(0.0);
    Ok(o)
}
