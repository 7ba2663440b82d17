//! Dephasing `ρ` in an eigenbasis of `σ` splits `S(ρ‖σ)` into a quantum
//! part and a classical part. With a degenerate `σ` the split does not
//! depend on which eigenbasis is used.
//!
//! ```bash
//! cargo run -p relent --example dephasing_line
//! ```

use relent::linop::Tolerances;
use relent::lueders::{theorem2_check, theorem2_check_in_basis};
use relent::stategen::Sampler;

fn main() -> relent::error::Result<()> {
    let tol = Tolerances::default();
    let mut sampler = Sampler::new(5);
    let rho = sampler.density(5, 3, &tol)?;

    let sigma = sampler.density(5, 5, &tol)?;
    let r = theorem2_check(&rho, &sigma)?;
    println!("generic sigma:  {} = {} + {}", r.line.d_total, r.line.d_first, r.line.d_second);

    // eigenvalue levels with multiplicities 2, 2, 1
    let degenerate = sampler.degenerate_density(&[2, 2, 1], &tol)?;
    for k in 0..3 {
        let basis = if k == 0 { degenerate.basis.clone() } else { degenerate.alternative_basis(&mut sampler) };
        let r = theorem2_check_in_basis(&rho, &degenerate.state, &basis)?;
        println!(
            "degenerate, basis {k}: S(rho||mu) = {}  S(mu||sigma) = {}  residual = {:.2e}",
            r.line.d_first,
            r.line.d_second,
            r.line.residual.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
