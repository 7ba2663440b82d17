//! Runs a small seeded verification campaign in-process and prints the
//! summary and the worst trial.
//!
//! ```bash
//! cargo run -p relent --example verify_campaign -- theorem1
//! ```

use relent::cli::{run_campaign, Identity, VerifyConfig};

fn main() {
    let identity: Identity = std::env::args().nth(1).as_deref().unwrap_or("theorem1").parse().unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });
    let cfg = VerifyConfig { dims: vec![2, 3, 4, 8], trials: 50, seed: 1, include_infinite: true, ..VerifyConfig::new(identity) };
    let report = run_campaign(&cfg, None).expect("valid configuration");

    let s = &report.summary;
    println!("{identity}: {} trials, {} failures, max residual {:.3e}, {} infinite", s.records, s.failures, s.max_residual, s.infinite_cases);
    if let Some(worst) = report
        .records
        .iter()
        .filter_map(|r| r.residual.value().map(|v| (v, r)))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, r)| r)
    {
        println!("worst: dim {} trial {} seed {:#x} ({})", worst.dim, worst.trial, worst.seed, worst.case);
    }
}
