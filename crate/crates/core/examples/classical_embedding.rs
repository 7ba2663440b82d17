//! Classical relative entropy is the quantum one restricted to states
//! that are diagonal in a common basis.
//!
//! ```bash
//! cargo run -p relent --example classical_embedding
//! ```

use relent::entropy::ProbabilityVector;
use relent::linop::Tolerances;
use relent::mixing::classical_embedding_check;
use relent::stategen::Sampler;

fn main() -> relent::error::Result<()> {
    let tol = Tolerances::default();
    let mut sampler = Sampler::new(3);
    let basis = sampler.unitary(4);

    let p = ProbabilityVector::new(vec![0.4, 0.3, 0.2, 0.1], &tol)?;
    let w = ProbabilityVector::uniform(4, &tol)?;
    let (classical, quantum) = classical_embedding_check(&p, &w, &basis, &tol)?;
    println!("H(p||uniform)          = {classical}");
    println!("S(rho_p || rho_w)      = {quantum}");

    let gap = ProbabilityVector::new(vec![0.5, 0.5, 0.0, 0.0], &tol)?;
    let (classical, quantum) = classical_embedding_check(&w, &gap, &basis, &tol)?;
    println!("H(uniform||gap)        = {classical}");
    println!("S(rho_uniform||rho_gap) = {quantum}");
    Ok(())
}
