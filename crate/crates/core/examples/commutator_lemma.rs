//! The commutator inequality for a random symmetric pencil and a random
//! multiplication operator.
//!
//!     cargo run --example commutator_lemma -- 7

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_bounds::bounds::Tolerance;
use spectral_bounds::certifier::commutator_lemma_all;

fn main() -> spectral_bounds::Result<()> {
    let seed = std::env::args().nth(1).map_or(7, |a| a.parse().expect("seed"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 12;
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    let stiffness = &a * a.transpose();
    let mass: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..2.0)).collect();
    let g: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();

    println!(" k          lhs          rhs        slack");
    for c in commutator_lemma_all(&stiffness, &mass, &g, Tolerance::Absolute(1e-10))? {
        println!("{:>2}  {:>11.5}  {:>11.5}  {:>11.3e}", c.k, c.lhs, c.rhs, c.slack);
        assert!(c.satisfied);
    }
    Ok(())
}
