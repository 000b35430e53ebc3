//! Exact saturation of the universal inequality on round spheres, and the
//! same identity for the shifted family `−Δ + g|h|²`.
//!
//!     cargo run --example sphere_saturation -- 3 12

use num_bigint::BigInt;
use num_rational::BigRational;
use spectral_bounds::certifier::{certify_gap_shift, certify_saturation, exact_slack};
use spectral_bounds::spectra::{gap_index, sphere_spectrum};

fn main() -> spectral_bounds::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u32>().expect("integer argument"));
    let n = args.next().unwrap_or(2);
    let m_max = args.next().unwrap_or(10);

    let spectrum = sphere_spectrum(n, 5)?;
    println!("S^{n} levels:");
    for level in spectrum.entries() {
        println!("  λ = {:>4}  multiplicity {}", level.value, level.multiplicity);
    }

    println!("\n  m  gap index k        lhs = rhs");
    for r in certify_saturation(n, m_max)? {
        assert!(r.equal, "identity broken at m = {}", r.m);
        println!("{:>3}  {:>11}  {:>16}", r.m, r.k, r.lhs);
    }

    let g = BigRational::new(BigInt::from(-3), BigInt::from(7));
    let shifted = certify_gap_shift(n, m_max, &g)?;
    println!(
        "\ng = {g}: k = {}, exact slack {} (gap index {})",
        shifted.k,
        exact_slack(&shifted),
        gap_index(n, m_max)?
    );
    Ok(())
}
