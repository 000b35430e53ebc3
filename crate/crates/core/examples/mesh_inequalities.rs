//! The full mesh pipeline: assemble `−Δ + q`, solve, integrate `δ_i`, and
//! check the universal inequality and the two-sided bound for each `k`.
//!
//!     cargo run --release --example mesh_inequalities -- ellipsoid:1:1:1.5:3 gh2:0.1

use spectral_bounds::verify::{mesh_verify, MeshOptions, MeshSource};

fn main() -> spectral_bounds::Result<()> {
    let mut args = std::env::args().skip(1);
    let source = MeshSource::parse_generator(&args.next().unwrap_or_else(|| "icosphere:3".into()))?;
    let mut opts = MeshOptions::new(source, 12);
    opts.potential = args.next().unwrap_or_else(|| "zero".into()).parse()?;

    let report = mesh_verify(&opts)?;
    println!("{} with q = {}: {}", opts.source, opts.potential, if report.pass { "pass" } else { "FAIL" });
    println!("\n k   λ_(k+1)     lower     upper   yang slack");
    for (bound, yang) in report.bounds.iter().zip(report.rows("yang")) {
        println!(
            "{:>2}  {:>8.4}  {:>8.4}  {:>8.4}  {:>11.4}",
            bound.k,
            bound.value.unwrap_or(f64::NAN),
            bound.lower,
            bound.upper,
            yang.slack
        );
    }
    println!();
    for (name, value) in &report.values {
        println!("{name:>22} = {value:.6}");
    }
    Ok(())
}
