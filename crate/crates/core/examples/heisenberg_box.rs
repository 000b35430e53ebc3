//! Dirichlet sublaplacian on a cube in the first Heisenberg group and the
//! universal bounds that hold for it.
//!
//!     cargo run --release --example heisenberg_box -- 16

use spectral_bounds::verify::{heisenberg_verify, HeisenbergOptions};

fn main() -> spectral_bounds::Result<()> {
    let res = std::env::args().nth(1).map_or(16, |a| a.parse().expect("resolution"));
    let report = heisenberg_verify(&HeisenbergOptions::new(1, 2.0, res, 8))?;
    let solver = report.solver.as_ref().expect("solver summary");
    println!("{res}³ grid, {} unknowns, {} iterations", solver.unknowns, solver.iterations);
    println!("\n k   λ_(k+1)     lower     upper    simple");
    for (bound, simple) in report.bounds.iter().zip(report.rows("simple_upper")) {
        println!(
            "{:>2}  {:>8.4}  {:>8.4}  {:>8.4}  {:>8.4}",
            bound.k,
            bound.value.unwrap_or(f64::NAN),
            bound.lower,
            bound.upper,
            simple.rhs
        );
    }
    println!("\nall checks {}", if report.pass { "pass" } else { "FAIL" });
    Ok(())
}
