//! The logarithm of a block-diagonal state splits over its blocks:
//! `log σ = Σ_k (log w_k) Q_k + Σ_k log σ_k`, with every log taken on its
//! support only.
//!
//! ```bash
//! cargo run -p relent --example extended_log
//! ```

use relent::linop::Tolerances;
use relent::mixing::lemma1_log_decomposition;
use relent::stategen::Sampler;

fn main() -> relent::error::Result<()> {
    let tol = Tolerances::default();
    let mut sampler = Sampler::new(7);

    // blocks of size 2, 3 and 1 in a random basis of C^6, rank-deficient
    // parts, and one block with weight zero
    let d = sampler.decomposition(6, &[2, 3, 1], true, 1, &tol)?;
    println!("weights       = {:?}", d.weights().as_slice());
    println!("block ranks   = {:?}", d.supports().iter().map(|q| q.rank()).collect::<Vec<_>>());
    println!("rank(sigma)   = {}", d.sigma().rank());

    let from_blocks = lemma1_log_decomposition(&d);
    let direct = d.sigma().extended_log();
    println!("||sum of block logs - log sigma||_F = {:.3e}", from_blocks.distance(direct.as_matrix()));
    Ok(())
}
