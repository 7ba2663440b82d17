//! Command-line surface: `compute`, `verify` and `breakdown`.
//!
//! Exit codes: `0` success, `1` a verification trial failed, `2` bad input
//! (unreadable file, invalid state, invalid configuration).

pub mod campaign;
pub mod io;
pub mod report;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::entropy::{nats_to_bits, quantum_relative_entropy, von_neumann_entropy, ExtendedReal};
use crate::linop::{validate_density, DensityOperator, Projector, Tolerances};
use crate::mixing::{decompose_by_projectors, theorem1_breakdown};

pub use campaign::run_campaign;
pub use report::{Identity, Report, Residual, TrialRecord, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "relent", version, about = "Quantum relative entropy and numerical checks of its mixing property")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print S(ρ), S(σ), S(ρ‖σ) and the support ranks of two states.
    Compute(ComputeArgs),
    /// Run a randomized verification campaign for one identity.
    Verify(VerifyArgs),
    /// Print every term of the mixing decomposition of S(ρ‖σ).
    Breakdown(BreakdownArgs),
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    pub rho: PathBuf,
    pub sigma: PathBuf,
    /// Report in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
    /// Identity tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// lemma1, theorem1, corollary1, corollary2, corollary3, theorem2 or eq3a.
    pub identity: Identity,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', default_values_t = VerifyConfig::DEFAULT_DIMS)]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = VerifyConfig::DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pass threshold for residuals.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Include rank-deficient states and zero-weight blocks (default true).
    #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub include_singular: bool,
    /// Include support-violating pairs where both sides must be +∞.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub include_infinite: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores). Does not affect the report.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BreakdownArgs {
    pub rho: PathBuf,
    pub sigma: PathBuf,
    /// Comma-separated sizes of contiguous coordinate blocks.
    #[arg(long, value_delimiter = ',', conflicts_with = "blocks_file", required_unless_present = "blocks_file")]
    pub blocks: Option<Vec<usize>>,
    /// JSON file with explicit block projectors.
    #[arg(long)]
    pub blocks_file: Option<PathBuf>,
    #[arg(long)]
    pub bits: bool,
    #[arg(long)]
    pub tol: Option<f64>,
}

/// A failure carrying its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn tolerances(tol: Option<f64>) -> Result<Tolerances, CliError> {
    let t = tol.map_or_else(Tolerances::default, Tolerances::with_identity);
    t.validate().map_err(|e| CliError::input(e.to_string()))?;
    Ok(t)
}

fn load_state(path: &std::path::Path, tol: &Tolerances) -> Result<DensityOperator, CliError> {
    let m = io::read_matrix(path).map_err(CliError::input)?;
    validate_density(m, tol).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

struct Units {
    bits: bool,
}

impl Units {
    fn label(&self) -> &'static str {
        if self.bits { "bits" } else { "nats" }
    }

    fn real(&self, x: f64) -> String {
        let s = format!("{:.12}", if self.bits { nats_to_bits(x) } else { x });
        match s.strip_prefix('-') {
            Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
            _ => s,
        }
    }

    fn ext(&self, x: ExtendedReal) -> String {
        match x {
            ExtendedReal::Finite(v) => self.real(v),
            ExtendedReal::Infinite => "inf".into(),
        }
    }
}

pub fn cmd_compute(args: &ComputeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tol = tolerances(args.tol)?;
    let rho = load_state(&args.rho, &tol)?;
    let sigma = load_state(&args.sigma, &tol)?;
    if rho.dim() != sigma.dim() {
        return Err(CliError::input(format!("dimension mismatch: {} vs {}", rho.dim(), sigma.dim())));
    }
    let u = Units { bits: args.bits };
    let rel = quantum_relative_entropy(&rho, &sigma).map_err(|e| CliError::input(e.to_string()))?;
    let mut s = String::new();
    let _ = writeln!(s, "S(rho)        = {}", u.real(von_neumann_entropy(&rho)));
    let _ = writeln!(s, "S(sigma)      = {}", u.real(von_neumann_entropy(&sigma)));
    let _ = writeln!(s, "S(rho||sigma) = {}", u.ext(rel));
    let _ = writeln!(s, "rank(rho)     = {}", rho.rank());
    let _ = writeln!(s, "rank(sigma)   = {}", sigma.rank());
    let _ = writeln!(s, "units         = {}", u.label());
    out.write_all(s.as_bytes()).map_err(|e| CliError::input(e.to_string()))
}

/// Runs the campaign, writes the report, and prints a summary to `console`.
/// Fails with code 1 when any trial failed.
pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, console: &mut dyn Write) -> Result<Report, CliError> {
    let cfg = VerifyConfig {
        identity: args.identity,
        dims: args.dims.clone(),
        trials: args.trials,
        seed: args.seed,
        tol: tolerances(args.tol)?,
        include_singular: args.include_singular,
        include_infinite: args.include_infinite,
    };
    let start = Instant::now();
    let report = run_campaign(&cfg, args.threads).map_err(CliError::input)?;
    let elapsed = start.elapsed();
    let json = report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        None => out.write_all(json.as_bytes()).map_err(|e| CliError::input(e.to_string()))?,
    }
    let s = &report.summary;
    let _ = writeln!(
        console,
        "{}: {} records, {} failures, max residual {:.3e}, {} infinite cases, {:.3} s",
        cfg.identity,
        s.records,
        s.failures,
        s.max_residual,
        s.infinite_cases,
        elapsed.as_secs_f64()
    );
    if s.failures > 0 {
        return Err(CliError { code: 1, message: format!("{} of {} trials failed", s.failures, s.records) });
    }
    Ok(report)
}

fn coordinate_blocks(sizes: &[usize], dim: usize) -> Result<Vec<Projector>, CliError> {
    if sizes.contains(&0) {
        return Err(CliError::input("block sizes must be positive"));
    }
    let total: usize = sizes.iter().sum();
    if total > dim {
        return Err(CliError::input(format!("block sizes sum to {total}, exceeding dim {dim}")));
    }
    let mut sizes = sizes.to_vec();
    if total < dim {
        sizes.push(dim - total);
    }
    let mut start = 0;
    Ok(sizes
        .into_iter()
        .map(|s| {
            let p = Projector::coordinate(dim, start..start + s);
            start += s;
            p
        })
        .collect())
}

pub fn cmd_breakdown(args: &BreakdownArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tol = tolerances(args.tol)?;
    let rho = load_state(&args.rho, &tol)?;
    let sigma = load_state(&args.sigma, &tol)?;
    if rho.dim() != sigma.dim() {
        return Err(CliError::input(format!("dimension mismatch: {} vs {}", rho.dim(), sigma.dim())));
    }
    let blocks = match (&args.blocks, &args.blocks_file) {
        (Some(sizes), _) => coordinate_blocks(sizes, sigma.dim())?,
        (None, Some(path)) => io::read_projectors(path)
            .map_err(CliError::input)?
            .into_iter()
            .enumerate()
            .map(|(k, m)| Projector::new(m, &tol).map_err(|e| CliError::input(format!("projector {k}: {e}"))))
            .collect::<Result<_, _>>()?,
        (None, None) => return Err(CliError::input("either --blocks or --blocks-file is required")),
    };
    let d = decompose_by_projectors(&sigma, &blocks).map_err(|e| CliError::input(format!("invalid decomposition: {e}")))?;
    let b = theorem1_breakdown(&rho, &d).map_err(|e| CliError::input(e.to_string()))?;
    let u = Units { bits: args.bits };
    let list = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
    let mut s = String::new();
    let _ = writeln!(s, "blocks                      = {}", d.len());
    let _ = writeln!(s, "w_k                         = [{}]", list(d.weights().as_slice()));
    let _ = writeln!(s, "p_k = tr(rho Q_k)           = [{}]", list(&b.p));
    let _ = writeln!(s, "S(sum_k Q_k rho Q_k)        = {}", u.real(b.s_pinched));
    let _ = writeln!(s, "S(rho)                      = {}", u.real(b.s_rho));
    let _ = writeln!(s, "H(p_k||w_k)                 = {}", u.ext(b.h_rel));
    let _ = writeln!(s, "sum_k p_k S(rho_k||sigma_k) = {}", u.ext(b.avg_rel));
    if b.total_lhs.is_infinite() && b.total_rhs.is_infinite() {
        let _ = writeln!(s, "support leakage             = {:.3e}", b.leakage);
        let _ = writeln!(s, "LHS = RHS = inf");
    } else {
        let _ = writeln!(s, "RHS                         = {}", u.ext(b.total_rhs));
        let _ = writeln!(s, "LHS = S(rho||sigma)         = {}", u.ext(b.total_lhs));
        match b.residual {
            Some(r) => {
                let _ = writeln!(s, "residual                    = {r:.3e}");
            }
            None => {
                let _ = writeln!(s, "residual                    = infinite-mismatch");
            }
        }
    }
    let _ = writeln!(s, "units                       = {}", u.label());
    out.write_all(s.as_bytes()).map_err(|e| CliError::input(e.to_string()))
}

/// Dispatches a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(a, &mut stdout.lock()),
        Command::Verify(a) => cmd_verify(a, &mut stdout.lock(), &mut stderr.lock()).map(|_| ()),
        Command::Breakdown(a) => cmd_breakdown(a, &mut stdout.lock()),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
