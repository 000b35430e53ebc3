//! Block iterative solver against the dense reference on a random sparse
//! generalized problem.
//!
//!     cargo run --release --example solver_cross_check -- 150

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_bounds::eigensolve::{dense_solve, solve_smallest_pencil, SolverOptions};
use spectral_bounds::linalg::SymmetricAssembler;

fn main() -> spectral_bounds::Result<()> {
    let dim = std::env::args().nth(1).map_or(150, |a| a.parse().expect("dimension"));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // Path graph Laplacian plus random long-range springs and a positive shift.
    let mut asm = SymmetricAssembler::new(dim);
    let spring = |asm: &mut SymmetricAssembler, i: usize, j: usize, w: f64| {
        asm.add(i, i, w);
        asm.add(j, j, w);
        asm.add(i, j, -w);
        asm.add(j, i, -w);
    };
    for i in 1..dim {
        spring(&mut asm, i - 1, i, 1.0);
    }
    for _ in 0..dim {
        let (i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
        if i != j {
            spring(&mut asm, i, j, rng.gen_range(0.1..1.0));
        }
    }
    for i in 0..dim {
        asm.add(i, i, 0.01);
    }
    let k = asm.finish();
    let mass: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..1.5)).collect();

    let iterative = solve_smallest_pencil(&k, &mass, 8, &SolverOptions::default())?;
    let dense = dense_solve(&k.to_dense(), &DMatrix::from_diagonal(&mass.clone().into()))?;
    println!("dim {dim}, {} iterations\n", iterative.iterations);
    println!(" i        LOBPCG          dense    rel. diff");
    for i in 0..8 {
        let (a, b) = (iterative.eigenvalues[i], dense.eigenvalues[i]);
        println!("{:>2}  {a:>12.9}  {b:>12.9}  {:.1e}", i + 1, (a - b).abs() / b.abs());
    }
    Ok(())
}
