//! How much mean curvature a spectrum forces on any immersion into
//! Euclidean space.
//!
//!     cargo run --release --example immersibility_floor

use spectral_bounds::bounds::immersion_curvature_floor;
use spectral_bounds::eigensolve::{solve_smallest, SolverOptions};
use spectral_bounds::geometry::{assemble_laplacian, ellipsoid, flat_torus, mean_curvature};
use spectral_bounds::spectra::sphere_spectrum;

fn main() -> spectral_bounds::Result<()> {
    let sphere = sphere_spectrum(2, 6)?.to_f64().expanded(30);
    let floor = immersion_curvature_floor(&sphere, 2)?;
    println!("round S²: floor {:.4} at k = {} (|h|² = 4)", floor.floor, floor.k);

    let torus = flat_torus(1.0, 1.0, 32)?;
    let sol = solve_smallest(&assemble_laplacian(&torus)?, 10, &SolverOptions::default())?;
    let floor = immersion_curvature_floor(&sol.eigenvalues, 2)?;
    println!("unit flat torus: floor {:.3} at k = {}", floor.floor, floor.k);

    let mesh = ellipsoid(1.0, 1.0, 1.5, 3)?;
    let op = assemble_laplacian(&mesh)?;
    let sol = solve_smallest(&op, 20, &SolverOptions::default())?;
    let floor = immersion_curvature_floor(&sol.eigenvalues, 2)?;
    let geom = mean_curvature(&mesh, &op)?;
    println!(
        "ellipsoid(1, 1, 1.5): floor {:.4} at k = {}, measured max |h|² {:.4}",
        floor.floor,
        floor.k,
        geom.max_h_sq()
    );
    Ok(())
}
