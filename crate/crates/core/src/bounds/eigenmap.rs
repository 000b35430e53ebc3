//! Inequalities for manifolds admitting an eigenmap into a sphere.

use super::{quadratic_bounds, yang_sides, BoundResult, InequalityCheck, SpectralData, Tolerance};
use crate::{Error, Result};

/// `Σ(λ_{k+1}−λ_i)² ≤ Σ(λ_{k+1}−λ_i)(λ + 4(λ_i − ∫q u_i²))` where `λ` is the
/// eigenvalue the eigenmap is built from.
pub fn eigenmap_check(
    data: &SpectralData,
    lambda_map: f64,
    q_integrals: &[f64],
    tol: Tolerance,
) -> Result<InequalityCheck> {
    if !(lambda_map >= 0.0) {
        return Err(Error::invalid("eigenmap eigenvalue must be nonnegative"));
    }
    if q_integrals.len() != data.k() {
        return Err(Error::LengthMismatch {
            what: "q_integrals",
            expected: data.k(),
            actual: q_integrals.len(),
        });
    }
    let next = data.require_next()?;
    // λ + 4(λ_i − q_i) = 4(λ_i + λ/4 − q_i)
    let (lhs, rhs) = yang_sides(
        data.lambdas(),
        next,
        q_integrals.iter().map(|q| lambda_map / 4.0 - q),
        1.0,
        4.0,
    );
    Ok(InequalityCheck::new(data.k(), lhs, rhs, tol))
}

/// Two-sided bracket on `λ_{k+1}` from the eigenmap inequality.
///
/// Since `∫q u_i² ≥ inf q`, the eigenmap inequality implies the Euclidean
/// quadratic with dimension 1 and `δ'_i = λ/4 − inf q`; its roots are
/// returned.
pub fn eigenmap_bounds(data: &SpectralData, lambda_map: f64, inf_q: f64) -> Result<BoundResult> {
    if !(lambda_map >= 0.0) {
        return Err(Error::invalid("eigenmap eigenvalue must be nonnegative"));
    }
    let shifted = SpectralData::new(data.n(), data.lambdas().to_vec())?
        .with_deltas(vec![lambda_map / 4.0 - inf_q; data.k()])?;
    quadratic_bounds(&shifted, Some(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::CLOSED_FORM_TOLERANCE;
    use proptest::prelude::*;

    #[test]
    fn sphere_identity_eigenmap() {
        for n in 1..6u32 {
            let nf = f64::from(n);
            let d = SpectralData::new(n, vec![0.0]).unwrap().with_next(nf).unwrap();
            let c = eigenmap_check(&d, nf, &[0.0], CLOSED_FORM_TOLERANCE).unwrap();
            assert_eq!(c.slack, 0.0);
            let b = eigenmap_bounds(&d, nf, 0.0).unwrap();
            assert!((b.upper - nf).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_torus_circle_map() {
        // x ↦ (cos x, sin x) on a flat torus is an eigenmap for λ_2.
        let lambda_2 = 1.0;
        let d = SpectralData::new(2, vec![0.0])
            .unwrap()
            .with_next(lambda_2)
            .unwrap();
        let c = eigenmap_check(&d, lambda_2, &[0.0], CLOSED_FORM_TOLERANCE).unwrap();
        assert_eq!(c.slack, 0.0);
    }

    #[test]
    fn constant_potential_gauge() {
        let base = [0.5, 1.0, 2.0];
        let next = 4.0;
        let c0 = 2.5;
        let a = eigenmap_check(
            &SpectralData::new(3, base.to_vec()).unwrap().with_next(next).unwrap(),
            3.0,
            &[0.0; 3],
            CLOSED_FORM_TOLERANCE,
        )
        .unwrap();
        let shifted: Vec<f64> = base.iter().map(|l| l + c0).collect();
        let b = eigenmap_check(
            &SpectralData::new(3, shifted).unwrap().with_next(next + c0).unwrap(),
            3.0,
            &[c0; 3],
            CLOSED_FORM_TOLERANCE,
        )
        .unwrap();
        assert!((a.slack - b.slack).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let d = SpectralData::new(2, vec![0.0]).unwrap().with_next(1.0).unwrap();
        assert!(eigenmap_check(&d, -1.0, &[0.0], CLOSED_FORM_TOLERANCE).is_err());
        assert!(eigenmap_check(&d, 1.0, &[], CLOSED_FORM_TOLERANCE).is_err());
        let no_next = SpectralData::new(2, vec![0.0]).unwrap();
        assert!(eigenmap_check(&no_next, 1.0, &[0.0], CLOSED_FORM_TOLERANCE).is_err());
    }

    fn bisect_upper(l: &[f64], lambda_map: f64, inf_q: f64) -> f64 {
        // largest root of Σ(x−λ_i)² − Σ(x−λ_i)(λ + 4(λ_i − inf q))
        let f = |x: f64| -> f64 {
            l.iter()
                .map(|&li| (x - li) * (x - li) - (x - li) * (lambda_map + 4.0 * (li - inf_q)))
                .sum()
        };
        // vertex of the parabola
        let k = l.len() as f64;
        let mut lo = l
            .iter()
            .map(|&li| 2.0 * li + lambda_map + 4.0 * (li - inf_q))
            .sum::<f64>()
            / (2.0 * k);
        let mut hi = 1e6;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    proptest! {
        #[test]
        fn upper_matches_bisection(
            mut l in prop::collection::vec(0.0f64..20.0, 1..8),
            lambda_map in 0.1f64..10.0,
            inf_q in -2.0f64..2.0,
        ) {
            l.sort_by(f64::total_cmp);
            let d = SpectralData::new(2, l.clone()).unwrap();
            let b = eigenmap_bounds(&d, lambda_map, inf_q).unwrap();
            prop_assume!(b.feasible && b.discriminant > 1e-6);
            let oracle = bisect_upper(&l, lambda_map, inf_q);
            prop_assert!((b.upper - oracle).abs() <= 1e-7 * (1.0 + oracle.abs()));
            prop_assert!(b.lower <= b.upper);
        }

        #[test]
        fn gauge_shift_moves_upper_by_c(
            mut l in prop::collection::vec(0.0f64..20.0, 1..8),
            lambda_map in 0.1f64..10.0,
            inf_q in -2.0f64..2.0,
            c in -5.0f64..5.0,
        ) {
            l.sort_by(f64::total_cmp);
            let a = eigenmap_bounds(&SpectralData::new(2, l.clone()).unwrap(), lambda_map, inf_q).unwrap();
            let shifted: Vec<f64> = l.iter().map(|x| x + c).collect();
            let b = eigenmap_bounds(&SpectralData::new(2, shifted).unwrap(), lambda_map, inf_q + c).unwrap();
            prop_assert!((b.upper - a.upper - c).abs() <= 1e-9 * (1.0 + a.upper.abs()));
        }
    }
}
