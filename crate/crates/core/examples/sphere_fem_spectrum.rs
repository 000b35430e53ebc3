//! Cotangent finite elements on an icosphere against the closed-form
//! spectrum `ℓ(ℓ+1)` of the unit 2-sphere.
//!
//!     cargo run --release --example sphere_fem_spectrum -- 4

use spectral_bounds::eigensolve::{solve_smallest, SolverOptions};
use spectral_bounds::geometry::{assemble_laplacian, icosphere};
use spectral_bounds::spectra::sphere_spectrum;

fn main() -> spectral_bounds::Result<()> {
    let level = std::env::args().nth(1).map_or(3, |a| a.parse().expect("mesh level"));
    let mesh = icosphere(level)?;
    let op = assemble_laplacian(&mesh)?;
    println!("icosphere level {level}: {} vertices, area {:.6}", mesh.vertex_count(), mesh.total_area());

    let started = std::time::Instant::now();
    let sol = solve_smallest(&op, 16, &SolverOptions::default())?;
    println!("16 eigenpairs in {:.2?} ({} iterations)\n", started.elapsed(), sol.iterations);

    let exact = sphere_spectrum(2, 4)?.to_f64().expanded(16);
    println!(" i   computed      exact   rel. error");
    for (i, (&got, &want)) in sol.eigenvalues.iter().zip(&exact).enumerate() {
        let err = if want == 0.0 { got.abs() } else { (got - want).abs() / want };
        println!("{:>2}  {got:>9.5}  {want:>9.1}   {err:.2e}", i + 1);
    }
    Ok(())
}
