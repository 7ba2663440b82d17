//! Relative entropy between two qubit states, including the infinite case.
//!
//! ```bash
//! cargo run -p relent --example relative_entropy
//! ```

use relent::entropy::{nats_to_bits, quantum_relative_entropy, von_neumann_entropy};
use relent::linop::{leakage_mass, CVector, DensityOperator, Tolerances, C64};

fn main() -> relent::error::Result<()> {
    let tol = Tolerances::default();

    let ket0 = DensityOperator::from_diagonal(&[1.0, 0.0], &tol)?;
    let mixed = DensityOperator::maximally_mixed(2, &tol)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityOperator::pure(&CVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]), &tol)?;
    let biased = DensityOperator::from_diagonal(&[0.9, 0.1], &tol)?;

    println!("S(I/2)              = {:.6} bits", nats_to_bits(von_neumann_entropy(&mixed)));
    for (name, rho, sigma) in [
        ("S(|0><0| || I/2)", &ket0, &mixed),
        ("S(|+><+| || diag(.9,.1))", &plus, &biased),
        ("S(I/2 || |0><0|)", &mixed, &ket0),
    ] {
        let s = quantum_relative_entropy(rho, sigma)?;
        println!("{name:<26} = {s}   (leakage {:.3})", leakage_mass(rho, sigma, &tol));
    }
    Ok(())
}
