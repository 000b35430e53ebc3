//! The inequality engine on its own: feed a spectral prefix and curvature
//! data, get the universal inequality and a bracket on the next eigenvalue.
//!
//!     cargo run --example closed_form_bounds

use spectral_bounds::bounds::{quadratic_bounds, simple_upper, yang_check, SpectralData, CLOSED_FORM_TOLERANCE};
use spectral_bounds::spectra::sphere_spectrum;

fn main() -> spectral_bounds::Result<()> {
    // Unit S²: |h|² = 4 and q = 0, so every δ_i is 1.
    let values = sphere_spectrum(2, 6)?.to_f64().expanded(26);
    println!(" k   λ_(k+1)     lower     upper    simple   yang slack");
    for k in 1..values.len() {
        let data = SpectralData::from_prefix(2, &values, k)?.with_deltas(vec![1.0; k])?.with_delta_sup(1.0)?;
        let bound = quadratic_bounds(&data, None)?;
        let yang = yang_check(&data, CLOSED_FORM_TOLERANCE)?;
        println!(
            "{k:>2}  {:>8.3}  {:>8.3}  {:>8.3}  {:>8.3}  {:>11.3e}",
            values[k],
            bound.lower,
            bound.upper,
            simple_upper(&data)?,
            yang.slack
        );
    }
    Ok(())
}
