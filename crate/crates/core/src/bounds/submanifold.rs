//! Inequalities for Schrödinger operators on submanifolds of Euclidean
//! space (and, through the ambient constants, of spheres and projective
//! spaces).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::{yang_sides, BoundResult, InequalityCheck, SpectralData, Tolerance};
use crate::sum::compensated_sum;
use crate::{Error, Result};

/// `n Σ(λ_{k+1}−λ_i)² ≤ 4 Σ(λ_{k+1}−λ_i)(λ_i+δ_i)`.
pub fn yang_check(data: &SpectralData, tol: Tolerance) -> Result<InequalityCheck> {
    let deltas = data.require_deltas()?;
    let next = data.require_next()?;
    let (lhs, rhs) = yang_sides(
        data.lambdas(),
        next,
        deltas.iter().copied(),
        f64::from(data.n()),
        4.0,
    );
    Ok(InequalityCheck::new(data.k(), lhs, rhs, tol))
}

/// [`yang_check`] with every `δ_i` replaced by the uniform bound `δ`.
pub fn yang_check_simple(data: &SpectralData, tol: Tolerance) -> Result<InequalityCheck> {
    let delta = data.require_delta_sup()?;
    let next = data.require_next()?;
    let (lhs, rhs) = yang_sides(
        data.lambdas(),
        next,
        std::iter::repeat(delta),
        f64::from(data.n()),
        4.0,
    );
    Ok(InequalityCheck::new(data.k(), lhs, rhs, tol))
}

/// The quadratic in `x = λ_{k+1}` whose nonpositivity is the Yang
/// inequality (divided by `n`):
/// `k x² − x((2+4/n)Σλ_i + (4/n)Σδ_i) + (1+4/n)Σλ_i² + (4/n)Σλ_iδ_i`.
pub fn quadratic_polynomial(data: &SpectralData, n_eff: Option<u32>, x: f64) -> Result<f64> {
    let deltas = data.require_deltas()?;
    let n = f64::from(n_eff.unwrap_or(data.n()));
    let k = data.k() as f64;
    let lambdas = data.lambdas();
    let s_l = data.sum_lambda();
    let s_d = compensated_sum(deltas.iter().copied());
    let s_ll = compensated_sum(lambdas.iter().map(|l| l * l));
    let s_ld = compensated_sum(lambdas.iter().zip(deltas).map(|(l, d)| l * d));
    Ok(compensated_sum([
        k * x * x,
        -x * ((2.0 + 4.0 / n) * s_l + (4.0 / n) * s_d),
        (1.0 + 4.0 / n) * s_ll,
        (4.0 / n) * s_ld,
    ]))
}

/// Roots of [`quadratic_polynomial`]: the two-sided bracket on `λ_{k+1}`.
///
/// `n_eff` overrides the dimension in the coefficients (the eigenmap route
/// uses 1). A negative discriminant is reported through
/// [`BoundResult::feasible`] rather than as an error.
pub fn quadratic_bounds(data: &SpectralData, n_eff: Option<u32>) -> Result<BoundResult> {
    let deltas = data.require_deltas()?;
    let n = f64::from(n_eff.unwrap_or(data.n()));
    if n == 0.0 {
        return Err(Error::invalid("effective dimension must be at least 1"));
    }
    let k = data.k() as f64;
    let lambdas = data.lambdas();
    let mean_l = data.sum_lambda() / k;
    let mean_d = compensated_sum(deltas.iter().copied()) / k;
    let mean_ll = compensated_sum(lambdas.iter().map(|l| l * l)) / k;
    let mean_ld = compensated_sum(lambdas.iter().zip(deltas).map(|(l, d)| l * d)) / k;

    let center = (1.0 + 2.0 / n) * mean_l + (2.0 / n) * mean_d;
    let discriminant = compensated_sum([
        center * center,
        -(1.0 + 4.0 / n) * mean_ll,
        -(4.0 / n) * mean_ld,
    ]);
    Ok(BoundResult::from_center(center, discriminant))
}

/// `(1 + 4/n)(1/k)Σλ_i + 4δ/n`.
pub fn simple_upper(data: &SpectralData) -> Result<f64> {
    let delta = data.require_delta_sup()?;
    let n = f64::from(data.n());
    Ok((1.0 + 4.0 / n) * data.sum_lambda() / data.k() as f64 + 4.0 * delta / n)
}

/// `C_R(n,k) = ((4/n + 1)^{k−1} − 1)/4`, exactly.
pub fn reilly_constant(n: u32, k: u32) -> Result<BigRational> {
    if n == 0 || k == 0 {
        return Err(Error::invalid("reilly_constant needs n ≥ 1 and k ≥ 1"));
    }
    let growth = reilly_growth(n, k);
    Ok((growth - BigRational::one()) / BigRational::from_integer(BigInt::from(4)))
}

fn reilly_growth(n: u32, k: u32) -> BigRational {
    let base = BigRational::new(BigInt::from(n + 4), BigInt::from(n));
    num_traits::pow(base, (k - 1) as usize)
}

/// Upper bounds `λ_k ≤ (4/n+1)^{k−1} λ_1 + C_R(n,k)‖h‖²_∞` for `k = 2..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReillyChain {
    pub n: u32,
    pub k_max: u32,
    /// `C_R(n,k)` for `k = 2..=k_max`.
    #[serde(serialize_with = "serialize_rationals")]
    pub constants: Vec<BigRational>,
    /// Bound on `λ_k` for `k = 2..=k_max`; nondecreasing when `λ_1 ≥ 0`.
    pub bounds: Vec<f64>,
}

fn serialize_rationals<S: serde::Serializer>(
    v: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

impl ReillyChain {
    pub fn bound(&self, k: u32) -> Option<f64> {
        if k < 2 || k > self.k_max {
            return None;
        }
        self.bounds.get((k - 2) as usize).copied()
    }

    pub fn constant(&self, k: u32) -> Option<&BigRational> {
        if k < 2 {
            return None;
        }
        self.constants.get((k - 2) as usize)
    }

    /// `λ_k ≤ bound_k` for each `k ≥ 2` present in `spectrum = [λ_1, λ_2, …]`.
    pub fn check(&self, spectrum: &[f64], tol: Tolerance) -> Vec<InequalityCheck> {
        (2..=self.k_max)
            .filter_map(|k| {
                let lambda = *spectrum.get(k as usize - 1)?;
                let bound = self.bound(k)?;
                Some(InequalityCheck::new(k as usize, lambda, bound, tol))
            })
            .collect()
    }
}

pub fn reilly_chain(lambda_1: f64, h_sup_sq: f64, n: u32, k_max: u32) -> Result<ReillyChain> {
    if !(h_sup_sq >= 0.0) {
        return Err(Error::invalid("‖h‖²_∞ must be nonnegative"));
    }
    if k_max < 2 {
        return Err(Error::invalid("k_max must be at least 2"));
    }
    if n == 0 {
        return Err(Error::invalid("dimension n must be at least 1"));
    }
    let mut constants = Vec::new();
    let mut bounds = Vec::new();
    for k in 2..=k_max {
        let growth = reilly_growth(n, k).to_f64().unwrap_or(f64::INFINITY);
        let c = reilly_constant(n, k)?;
        bounds.push(growth * lambda_1 + c.to_f64().unwrap_or(f64::INFINITY) * h_sup_sq);
        constants.push(c);
    }
    Ok(ReillyChain {
        n,
        k_max,
        constants,
        bounds,
    })
}

/// `λ_2 ≤ (1/(nV))∫|h|²`, i.e. `λ_2 ≤ mean(|h|²)/n`, for closed
/// submanifolds with `q = 0`.
pub fn reilly_first(lambda_2: f64, mean_h_sq: f64, n: u32, tol: Tolerance) -> Result<InequalityCheck> {
    if n == 0 {
        return Err(Error::invalid("dimension n must be at least 1"));
    }
    if !(mean_h_sq >= 0.0) {
        return Err(Error::invalid("mean |h|² must be nonnegative"));
    }
    Ok(InequalityCheck::new(1, lambda_2, mean_h_sq / f64::from(n), tol))
}

/// Lower bound on `‖h‖²_∞` forced by a Laplace spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureFloor {
    /// `max(0, max_k …)`.
    pub floor: f64,
    /// The `k` attaining the unfloored maximum.
    pub k: usize,
    /// `n λ_{k+1} − ((n+4)/k) Σ_{i≤k} λ_i` for `k = 1..=K`.
    pub per_k: Vec<f64>,
}

/// Maximum over `k ≤ K` of `n λ_{k+1} − ((n+4)/k)Σ_{i≤k} λ_i`, floored at
/// zero, from the prefix `λ_1..λ_{K+1}`.
pub fn immersion_curvature_floor(prefix: &[f64], n: u32) -> Result<CurvatureFloor> {
    if n == 0 {
        return Err(Error::invalid("dimension n must be at least 1"));
    }
    if prefix.len() < 2 {
        return Err(Error::invalid("need at least λ_1 and λ_2"));
    }
    SpectralData::new(n, prefix.to_vec())?;
    let nf = f64::from(n);
    let mut running = crate::sum::CompensatedSum::new();
    let per_k: Vec<f64> = (1..prefix.len())
        .map(|k| {
            running.add(prefix[k - 1]);
            nf * prefix[k] - (nf + 4.0) / k as f64 * running.value()
        })
        .collect();
    let (best_idx, best) = per_k
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(CurvatureFloor {
        floor: best.max(0.0),
        k: best_idx + 1,
        per_k,
    })
}

/// `δ̄_i = (∫|h|²u_i² + c − 4∫q u_i²)/4` for immersions into spheres or
/// projective spaces; feed the result to [`yang_check`]/[`quadratic_bounds`].
pub fn ambient_deltas(h_sq_integrals: &[f64], q_integrals: &[f64], c: f64) -> Result<Vec<f64>> {
    if h_sq_integrals.len() != q_integrals.len() {
        return Err(Error::LengthMismatch {
            what: "q_integrals",
            expected: h_sq_integrals.len(),
            actual: q_integrals.len(),
        });
    }
    Ok(h_sq_integrals
        .iter()
        .zip(q_integrals)
        .map(|(h, q)| 0.25 * (h + c - 4.0 * q))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::CLOSED_FORM_TOLERANCE;
    use proptest::prelude::*;

    fn data(n: u32, lambdas: &[f64], deltas: &[f64]) -> SpectralData {
        SpectralData::new(n, lambdas.to_vec())
            .unwrap()
            .with_deltas(deltas.to_vec())
            .unwrap()
    }

    /// Independent root oracle: bisection on the Yang form
    /// `n Σ(x−λ_i)² − 4Σ(x−λ_i)(λ_i+δ_i)`, a convex parabola in x.
    fn yang_form(n: f64, l: &[f64], d: &[f64], x: f64) -> f64 {
        l.iter()
            .zip(d)
            .map(|(&li, &di)| n * (x - li) * (x - li) - 4.0 * (x - li) * (li + di))
            .sum()
    }

    fn bisect_roots(n: f64, l: &[f64], d: &[f64]) -> Option<(f64, f64)> {
        // minimum of the parabola by ternary search, then bisection on each side
        let (mut a, mut b) = (-1e4, 1e4);
        for _ in 0..300 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if yang_form(n, l, d, m1) < yang_form(n, l, d, m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        let xmin = 0.5 * (a + b);
        if yang_form(n, l, d, xmin) > 0.0 {
            return None;
        }
        let root = |mut lo: f64, mut hi: f64| {
            let sign_lo = yang_form(n, l, d, lo) > 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (yang_form(n, l, d, mid) > 0.0) == sign_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        Some((root(-1e4, xmin), root(xmin, 1e4)))
    }

    #[test]
    fn yang_examples() {
        let d = data(2, &[0.0], &[1.0]).with_next(2.0).unwrap();
        let c = yang_check(&d, CLOSED_FORM_TOLERANCE).unwrap();
        assert_eq!((c.lhs, c.rhs, c.slack), (8.0, 8.0, 0.0));
        assert!(c.satisfied);

        let d = data(2, &[0.0, 2.0, 2.0, 2.0], &[1.0; 4]).with_next(6.0).unwrap();
        let c = yang_check(&d, CLOSED_FORM_TOLERANCE).unwrap();
        assert_eq!((c.lhs, c.rhs), (168.0, 168.0));

        let d = data(2, &[0.0], &[1.0]).with_next(3.0).unwrap();
        let c = yang_check(&d, CLOSED_FORM_TOLERANCE).unwrap();
        assert_eq!((c.lhs, c.rhs), (18.0, 12.0));
        assert!(!c.satisfied);
    }

    #[test]
    fn yang_missing_data() {
        let d = SpectralData::new(2, vec![0.0]).unwrap();
        assert!(matches!(
            yang_check(&d, CLOSED_FORM_TOLERANCE),
            Err(Error::MissingData(_))
        ));
        let d = d.with_deltas(vec![1.0]).unwrap();
        assert!(matches!(
            yang_check(&d, CLOSED_FORM_TOLERANCE),
            Err(Error::MissingData(_))
        ));
    }

    #[test]
    fn quadratic_examples() {
        let b = quadratic_bounds(&data(2, &[0.0], &[1.0]), None).unwrap();
        assert_eq!((b.lower, b.upper, b.discriminant), (0.0, 2.0, 1.0));
        assert!(b.feasible);

        let d = data(2, &[0.0, 2.0, 2.0, 2.0], &[1.0; 4]);
        let b = quadratic_bounds(&d, None).unwrap();
        let (lo, hi) = bisect_roots(2.0, d.lambdas(), d.deltas().unwrap()).unwrap();
        assert!((b.upper - 6.0).abs() < 1e-12);
        assert!((b.upper - hi).abs() < 1e-9 && (b.lower - lo).abs() < 1e-9);
    }

    #[test]
    fn quadratic_symmetric_case() {
        for n in 1..6 {
            let (a, d) = (3.5, 0.75);
            let b = quadratic_bounds(&data(n, &[a; 5], &[d; 5]), None).unwrap();
            let expected = ((2.0 / n as f64) * (a + d)).powi(2);
            assert!((b.discriminant - expected).abs() < 1e-12);
            assert!(b.feasible);
        }
    }

    #[test]
    fn simple_upper_examples() {
        let d = SpectralData::new(2, vec![0.0]).unwrap().with_delta_sup(1.0).unwrap();
        assert_eq!(simple_upper(&d).unwrap(), 2.0);
        let d = SpectralData::new(2, vec![0.0, 2.0, 2.0, 2.0])
            .unwrap()
            .with_delta_sup(1.0)
            .unwrap();
        assert_eq!(simple_upper(&d).unwrap(), 6.5);
        let d = SpectralData::new(3, vec![1.7]).unwrap().with_delta_sup(0.0).unwrap();
        assert!((simple_upper(&d).unwrap() - (1.0 + 4.0 / 3.0) * 1.7).abs() < 1e-15);
        assert!(simple_upper(&SpectralData::new(2, vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn yang_simple_examples() {
        let base = SpectralData::new(2, vec![0.0]).unwrap().with_next(2.0).unwrap();
        let c = yang_check_simple(&base.clone().with_delta_sup(1.0).unwrap(), CLOSED_FORM_TOLERANCE)
            .unwrap();
        assert_eq!(c.slack, 0.0);
        let c = yang_check_simple(&base.clone().with_delta_sup(2.0).unwrap(), CLOSED_FORM_TOLERANCE)
            .unwrap();
        assert_eq!((c.rhs, c.slack), (16.0, 8.0));

        let d = SpectralData::new(2, vec![0.0, 1.0])
            .unwrap()
            .with_next(3.0)
            .unwrap()
            .with_deltas(vec![0.3, 0.8])
            .unwrap()
            .with_delta_sup(1.0)
            .unwrap();
        let full = yang_check(&d, CLOSED_FORM_TOLERANCE).unwrap();
        let simple = yang_check_simple(&d, CLOSED_FORM_TOLERANCE).unwrap();
        assert!(simple.slack >= full.slack);
    }

    #[test]
    fn reilly_constant_examples() {
        let r = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
        assert_eq!(reilly_constant(7, 1).unwrap(), r(0, 1));
        assert_eq!(reilly_constant(2, 2).unwrap(), r(1, 2));
        assert_eq!(reilly_constant(4, 3).unwrap(), r(3, 4));
    }

    #[test]
    fn reilly_chain_examples() {
        let chain = reilly_chain(0.0, 4.0, 2, 2).unwrap();
        assert_eq!(chain.bound(2), Some(2.0));
        let clifford_lambda_2 = 2.0;
        let checks = chain.check(&[0.0, clifford_lambda_2], CLOSED_FORM_TOLERANCE);
        assert_eq!(checks.len(), 1);
        assert_eq!(checks[0].slack, 0.0);

        let chain = reilly_chain(1.5, 0.0, 3, 6).unwrap();
        for k in 2..=6u32 {
            let expected = (7.0f64 / 3.0).powi(k as i32 - 1) * 1.5;
            assert!((chain.bound(k).unwrap() - expected).abs() < 1e-12 * expected);
        }
        assert!(chain.bounds.windows(2).all(|w| w[1] >= w[0]));
        assert!(reilly_chain(0.0, -1.0, 2, 3).is_err());
        assert!(reilly_chain(0.0, 1.0, 2, 1).is_err());
    }

    #[test]
    fn reilly_first_examples() {
        assert_eq!(reilly_first(2.0, 4.0, 2, CLOSED_FORM_TOLERANCE).unwrap().slack, 0.0);
        assert!(reilly_first(0.0, 0.0, 3, CLOSED_FORM_TOLERANCE).unwrap().satisfied);
        assert!(!reilly_first(2.5, 4.0, 2, CLOSED_FORM_TOLERANCE).unwrap().satisfied);
    }

    #[test]
    fn curvature_floor_examples() {
        let f = immersion_curvature_floor(&[0.0, 2.0], 2).unwrap();
        assert_eq!((f.floor, f.k), (4.0, 1));
        let f = immersion_curvature_floor(&[3.0; 6], 2).unwrap();
        assert_eq!(f.floor, 0.0);
        let f = immersion_curvature_floor(&[0.0, 2.0, 2.0, 2.0, 2.0], 2).unwrap();
        assert_eq!((f.floor, f.k), (4.0, 1));
        assert!(immersion_curvature_floor(&[1.0], 2).is_err());
    }

    #[test]
    fn ambient_delta_examples() {
        assert_eq!(ambient_deltas(&[0.0], &[0.0], 4.0).unwrap(), vec![1.0]);
        // q = (|h|² + c)/4
        let h = [1.0, 3.0];
        let q: Vec<f64> = h.iter().map(|x| (x + 16.0) / 4.0).collect();
        assert_eq!(ambient_deltas(&h, &q, 16.0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(ambient_deltas(&[0.0], &[1.0], 16.0).unwrap(), vec![3.0]);
        assert!(ambient_deltas(&[0.0], &[], 1.0).is_err());
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    proptest! {
        #[test]
        fn upper_root_zeroes_polynomial(
            n in 1u32..6,
            lambdas in prop::collection::vec(0.0f64..50.0, 1..12),
            delta in 0.0f64..5.0,
        ) {
            let lambdas = sorted(lambdas);
            let k = lambdas.len();
            let d = data(n, &lambdas, &vec![delta; k]);
            let b = quadratic_bounds(&d, None).unwrap();
            if !b.feasible {
                // No real root: the parabola stays positive at its vertex.
                prop_assert!(quadratic_polynomial(&d, None, b.center).unwrap() > 0.0);
                return Ok(());
            }
            let p = quadratic_polynomial(&d, None, b.upper).unwrap();
            let scale = k as f64 * b.upper * b.upper + 1.0;
            prop_assert!(p.abs() <= 1e-9 * scale, "p = {p}, scale = {scale}");
            if let Some((lo, hi)) = bisect_roots(f64::from(n), &lambdas, &vec![delta; k]) {
                prop_assert!((hi - b.upper).abs() <= 1e-7 * (1.0 + hi.abs()));
                prop_assert!((lo - b.lower).abs() <= 1e-7 * (1.0 + lo.abs()));
            }
        }

        #[test]
        fn simple_upper_dominates_quadratic(
            n in 1u32..6,
            lambdas in prop::collection::vec(0.0f64..50.0, 1..12),
            delta in 0.0f64..5.0,
        ) {
            let lambdas = sorted(lambdas);
            let k = lambdas.len();
            let d = data(n, &lambdas, &vec![delta; k]).with_delta_sup(delta).unwrap();
            let q = quadratic_bounds(&d, None).unwrap();
            let s = simple_upper(&d).unwrap();
            prop_assert!(s >= q.upper - 1e-9 * s.abs().max(1.0));
        }

        #[test]
        fn yang_slack_shift_covariant(
            n in 1u32..6,
            lambdas in prop::collection::vec(0.0f64..20.0, 1..10),
            gap in 0.0f64..10.0,
            deltas_seed in prop::collection::vec(-1.0f64..3.0, 10),
            shift in -10.0f64..10.0,
        ) {
            let lambdas = sorted(lambdas);
            let k = lambdas.len();
            let next = lambdas[k - 1] + gap;
            let deltas = deltas_seed[..k].to_vec();
            let a = yang_check(&data(n, &lambdas, &deltas).with_next(next).unwrap(), CLOSED_FORM_TOLERANCE).unwrap();
            // H_g: all eigenvalues shift by c while λ_i + δ_i is unchanged,
            // i.e. δ_i → δ_i − c.
            let shifted: Vec<f64> = lambdas.iter().map(|l| l + shift).collect();
            let shifted_d: Vec<f64> = deltas.iter().map(|d| d - shift).collect();
            let b = yang_check(&data(n, &shifted, &shifted_d).with_next(next + shift).unwrap(), CLOSED_FORM_TOLERANCE).unwrap();
            prop_assert!((a.slack - b.slack).abs() <= 1e-9 * (1.0 + a.lhs.abs() + a.rhs.abs()));
        }

        #[test]
        fn floor_monotone_in_next(
            n in 1u32..5,
            prefix in prop::collection::vec(0.0f64..30.0, 2..10),
            drop in 0.0f64..1.0,
        ) {
            let mut prefix = sorted(prefix);
            let a = immersion_curvature_floor(&prefix, n).unwrap();
            let last = prefix.len() - 1;
            prefix[last] -= drop * (prefix[last] - prefix[last - 1]);
            let b = immersion_curvature_floor(&prefix, n).unwrap();
            prop_assert!(b.floor <= a.floor + 1e-12);
        }
    }
}
