//! Equality cases of the first-eigenvalue and chained upper bounds: the
//! round sphere in R³ and the Clifford torus in R⁴.
//!
//!     cargo run --release --example reilly_clifford

use spectral_bounds::bounds::{reilly_chain, reilly_constant, reilly_first, Tolerance};
use spectral_bounds::eigensolve::{solve_smallest, SolverOptions};
use spectral_bounds::geometry::{assemble_laplacian, clifford_torus, icosphere, mean_curvature, TriangleMesh};

fn report(name: &str, mesh: &TriangleMesh) -> spectral_bounds::Result<()> {
    let op = assemble_laplacian(mesh)?;
    let geom = mean_curvature(mesh, &op)?;
    let sol = solve_smallest(&op, 4, &SolverOptions::default())?;
    let lambda = &sol.eigenvalues;
    let first = reilly_first(lambda[1], geom.mean_h_sq(&op), 2, Tolerance::Relative(0.03))?;
    let chain = reilly_chain(lambda[0], geom.max_h_sq(), 2, 4)?;
    println!("{name}: λ_2 = {:.6}, mean |h|²/n = {:.6}, ratio {:.4}", lambda[1], first.rhs, lambda[1] / first.rhs);
    for k in 2..=4u32 {
        println!("   λ_{k} = {:.5} ≤ {:.5}", lambda[k as usize - 1], chain.bound(k).unwrap_or(f64::NAN));
    }
    Ok(())
}

fn main() -> spectral_bounds::Result<()> {
    for k in 2..=5 {
        println!("C_R(2, {k}) = {}", reilly_constant(2, k)?);
    }
    println!();
    report("icosphere(4)", &icosphere(4)?)?;
    report("clifford(48)", &clifford_torus(48)?)?;
    Ok(())
}
