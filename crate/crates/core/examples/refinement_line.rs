//! Measuring a coarse observable and then a finer one lies on a "straight
//! line": the relative entropies along `ρ → ρ_A → ρ_B` add up.
//!
//! ```bash
//! cargo run -p relent --example refinement_line
//! ```

use relent::linop::Tolerances;
use relent::lueders::corollary2_check;
use relent::stategen::{RefineMode, Sampler};

fn main() -> relent::error::Result<()> {
    let tol = Tolerances::default();
    let mut sampler = Sampler::new(11);
    let rho = sampler.density(6, 4, &tol)?;

    let coarse = sampler.block_projectors(6, &[3, 3])?;
    let pair = sampler.refinement(&coarse, RefineMode::RandomSizes, None, &tol)?;
    println!("coarse ranks = {:?}", pair.coarse().projectors().iter().map(|p| p.rank()).collect::<Vec<_>>());
    println!("fine ranks   = {:?}", pair.fine().projectors().iter().map(|p| p.rank()).collect::<Vec<_>>());
    println!("grouping     = {:?}", pair.grouping());

    let r = corollary2_check(&rho, &pair)?;
    println!("S(rho||rho_B)                     = {}", r.line.d_total);
    println!("S(rho||rho_A) + S(rho_A||rho_B)   = {} + {}", r.line.d_first, r.line.d_second);
    println!("residual                          = {:.3e}", r.line.residual.unwrap_or(f64::NAN));
    println!("||rho_B - (rho_A)_B||_F           = {:.3e}", r.composition_defect);

    Ok(())
}
