//! Splits `S(ρ‖σ)` over an orthogonal decomposition of `σ` into four
//! nonnegative pieces, for a supported and a leaky `ρ`.
//!
//! ```bash
//! cargo run -p relent --example mixing_breakdown
//! ```

use relent::linop::{support_projector, Tolerances};
use relent::mixing::{theorem1_breakdown, MixingBreakdown};
use relent::stategen::Sampler;

fn show(label: &str, b: &MixingBreakdown) {
    println!("{label}");
    println!("  p_k                       = {:?}", b.p.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>());
    println!("  S(pinched) - S(rho)       = {:.6}", b.s_pinched - b.s_rho);
    println!("  H(p||w)                   = {}", b.h_rel);
    println!("  sum p_k S(rho_k||sigma_k) = {}", b.avg_rel);
    println!("  rhs = {}   lhs = {}   residual = {:?}", b.total_rhs, b.total_lhs, b.residual);
}

fn main() -> relent::error::Result<()> {
    let tol = Tolerances::default();
    let mut sampler = Sampler::new(2024);
    let d = sampler.decomposition(5, &[2, 2, 1], true, 0, &tol)?;
    let support = support_projector(d.sigma(), &tol);

    let rho = sampler.state_in_support(&support, 2, &tol)?;
    show("rho inside supp(sigma):", &theorem1_breakdown(&rho, &d)?);

    if support.rank() < 5 {
        let leaky = sampler.leaky_state(&support, 2, 0.05, &tol)?;
        show("rho with 5% mass outside supp(sigma):", &theorem1_breakdown(&leaky, &d)?);
    }
    Ok(())
}
