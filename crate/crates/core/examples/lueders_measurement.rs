//! An ideal measurement raises entropy by exactly the relative entropy
//! between the pre- and post-measurement states.
//!
//! ```bash
//! cargo run -p relent --example lueders_measurement
//! ```

use relent::entropy::von_neumann_entropy;
use relent::linop::{CVector, DensityOperator, Projector, Tolerances, C64};
use relent::lueders::{corollary1_check, lueders_state, ProjectiveObservable};

fn main() -> relent::error::Result<()> {
    let tol = Tolerances::default();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityOperator::pure(&CVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]), &tol)?;
    let z = ProjectiveObservable::new(
        vec![1.0, -1.0],
        vec![Projector::coordinate(2, [0]), Projector::coordinate(2, [1])],
        &tol,
    )?;

    let after = lueders_state(&plus, &z)?;
    println!("post-measurement diagonal = {:?}", (0..2).map(|i| after.as_matrix()[(i, i)].re).collect::<Vec<_>>());
    println!("S before, after           = {:.6}, {:.6}", von_neumann_entropy(&plus), von_neumann_entropy(&after));

    let report = corollary1_check(&plus, &z)?;
    println!("S(rho || rho_L)           = {}", report.direct);
    println!("entropy gain              = {:.12}", report.entropy_gain);
    println!("ln 2                      = {:.12}", std::f64::consts::LN_2);
    println!("supp rho in supp rho_L    = {}", report.support_included);
    Ok(())
}
