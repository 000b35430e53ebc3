//! Exact verification of the sphere saturation identity, and the matrix form
//! of the commutator lemma checked with a dense Jacobi decomposition.
//!
//! On the unit `n`-sphere with `δ_i = n²/4`, the universal inequality reads
//! `n Σ (Λ − λ_i)² ≤ Σ (Λ − λ_i)(4λ_i + n²)`. At every gap index both sides
//! are integers and coincide; everything here is computed with big integers
//! or rationals, so agreement is exact.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bounds::{InequalityCheck, Tolerance};
use crate::linalg::jacobi_eigen;
use crate::spectra::{gap_index, sphere_eigenvalue, sphere_multiplicity};
use crate::{Error, Result};

fn as_string<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn rational_as_string<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Both sides of the sphere identity at gap level `m`, denominators cleared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaturationReport {
    pub n: u32,
    pub m: u32,
    #[serde(serialize_with = "as_string")]
    pub k: BigInt,
    /// The potential coupling `g` for shifted checks, absent otherwise.
    #[serde(serialize_with = "rational_as_string")]
    pub g: Option<BigRational>,
    #[serde(serialize_with = "as_string")]
    pub lhs: BigInt,
    #[serde(serialize_with = "as_string")]
    pub rhs: BigInt,
    pub equal: bool,
}

/// `(λ_ℓ, μ_ℓ)` for `ℓ = 0..=levels`.
fn levels(n: u32, levels: u32) -> Result<Vec<(BigInt, BigInt)>> {
    (0..=levels)
        .map(|l| Ok((sphere_eigenvalue(n, l)?, sphere_multiplicity(n, l)?)))
        .collect()
}

/// Checks the identity at the gap index of level `m`: the prefix is every
/// eigenvalue of levels `0..=m` and `Λ = λ_{m+1} = (m+1)(m+n)`.
pub fn saturation_at(n: u32, m: u32) -> Result<SaturationReport> {
    let spectrum = levels(n, m + 1)?;
    let next = &spectrum[m as usize + 1].0;
    let n_sq = BigInt::from(n) * n;
    let mut lhs = BigInt::zero();
    let mut rhs = BigInt::zero();
    for (lambda, mu) in &spectrum[..=m as usize] {
        let gap = next - lambda;
        lhs += mu * &gap * &gap;
        rhs += mu * &gap * (lambda * 4 + &n_sq);
    }
    lhs *= n;
    Ok(SaturationReport {
        n,
        m,
        k: gap_index(n, m)?,
        g: None,
        equal: lhs == rhs,
        lhs,
        rhs,
    })
}

/// [`saturation_at`] for every `m ≤ m_max`, evaluated in parallel.
pub fn certify_saturation(n: u32, m_max: u32) -> Result<Vec<SaturationReport>> {
    if n == 0 {
        return Err(Error::invalid("dimension n must be at least 1"));
    }
    (0..=m_max).into_par_iter().map(|m| saturation_at(n, m)).collect()
}

/// The identity for `H_g = −Δ + g|h|²` on the sphere, where `|h|² = n²`:
/// every eigenvalue shifts by `g n²` and `δ_i = n²/4 − g n²`. Both sides are
/// evaluated as rationals and multiplied by the least common denominator.
pub fn certify_gap_shift(n: u32, m: u32, g: &BigRational) -> Result<SaturationReport> {
    let spectrum = levels(n, m + 1)?;
    let n_sq = BigRational::from_integer(BigInt::from(n) * n);
    let shift = g * &n_sq;
    let delta = &n_sq / BigInt::from(4) - &shift;
    let next = BigRational::from_integer(spectrum[m as usize + 1].0.clone()) + &shift;
    let mut lhs = BigRational::zero();
    let mut rhs = BigRational::zero();
    for (lambda, mu) in &spectrum[..=m as usize] {
        let lam = BigRational::from_integer(lambda.clone()) + &shift;
        let mu = BigRational::from_integer(mu.clone());
        let gap = &next - &lam;
        lhs += &mu * &gap * &gap;
        rhs += &mu * &gap * (&lam + &delta);
    }
    lhs *= BigRational::from_integer(BigInt::from(n));
    rhs *= BigRational::from_integer(BigInt::from(4));
    let common = lhs.denom().lcm(rhs.denom());
    let lhs_int = (lhs * BigRational::from_integer(common.clone())).to_integer();
    let rhs_int = (rhs * BigRational::from_integer(common)).to_integer();
    Ok(SaturationReport {
        n,
        m,
        k: gap_index(n, m)?,
        g: Some(g.clone()),
        equal: lhs_int == rhs_int,
        lhs: lhs_int,
        rhs: rhs_int,
    })
}

/// The inequality at an arbitrary index `k` of the sphere spectrum, gap or
/// not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SphereIndexReport {
    pub n: u32,
    pub k: u64,
    pub at_gap: bool,
    #[serde(serialize_with = "as_string")]
    pub lhs: BigInt,
    #[serde(serialize_with = "as_string")]
    pub rhs: BigInt,
    pub satisfied: bool,
}

/// Evaluates `n Σ (λ_{k+1} − λ_i)² ≤ Σ (λ_{k+1} − λ_i)(4λ_i + n²)` exactly for
/// every `k ≤ k_max`.
pub fn sphere_index_sweep(n: u32, k_max: u64) -> Result<Vec<SphereIndexReport>> {
    if n == 0 {
        return Err(Error::invalid("dimension n must be at least 1"));
    }
    let mut spectrum: Vec<(BigInt, u64)> = Vec::new();
    let mut total = 0u64;
    let mut level = 0u32;
    while total <= k_max {
        let mu = sphere_multiplicity(n, level)?
            .try_into()
            .map_err(|_| Error::invalid("multiplicity overflows u64"))?;
        spectrum.push((sphere_eigenvalue(n, level)?, mu));
        total += mu;
        level += 1;
    }
    let n_sq = BigInt::from(n) * n;
    let mut out = Vec::with_capacity(k_max as usize);
    let mut before = 0u64; // eigenvalues in levels below `l`
    for (l, (_, mu)) in spectrum.iter().enumerate() {
        for r in 1..=*mu {
            let k = before + r;
            if k > k_max {
                return Ok(out);
            }
            let at_gap = r == *mu;
            let next = if at_gap { &spectrum[l + 1].0 } else { &spectrum[l].0 };
            let mut lhs = BigInt::zero();
            let mut rhs = BigInt::zero();
            for (j, (lambda, mult)) in spectrum[..=l].iter().enumerate() {
                let count = if j == l { BigInt::from(r) } else { BigInt::from(*mult) };
                let gap = next - lambda;
                lhs += &count * &gap * &gap;
                rhs += &count * &gap * (lambda * 4 + &n_sq);
            }
            lhs *= n;
            out.push(SphereIndexReport {
                n,
                k,
                at_gap,
                satisfied: lhs <= rhs,
                lhs,
                rhs,
            });
        }
        before += mu;
    }
    Ok(out)
}

/// Parses `"0.25"`, `"-2"`, `"3/4"` or `"-1.5e-3"` as an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::invalid(format!("cannot parse {text:?} as a rational number"));
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    Ok(if negative { -value } else { value })
}

/// Precomputed per-eigenpair terms of the commutator inequality.
#[derive(Debug, Clone)]
pub struct CommutatorTerms {
    pub eigenvalues: Vec<f64>,
    /// `⟨[H, G] v_i, G v_i⟩`.
    pub cross: Vec<f64>,
    /// `‖[H, G] v_i‖²`.
    pub norm_sq: Vec<f64>,
}

impl CommutatorTerms {
    /// `Σ_{i≤k} (λ_{k+1} − λ_i)² ⟨[H,G]v_i, Gv_i⟩ ≤ Σ_{i≤k} (λ_{k+1} − λ_i) ‖[H,G]v_i‖²`.
    pub fn check(&self, k: usize, tol: Tolerance) -> Result<InequalityCheck> {
        if k == 0 || k >= self.eigenvalues.len() {
            return Err(Error::invalid(format!(
                "k must lie in 1..{} for a matrix of this size",
                self.eigenvalues.len()
            )));
        }
        let next = self.eigenvalues[k];
        let lhs = crate::sum::compensated_sum(
            (0..k).map(|i| (next - self.eigenvalues[i]).powi(2) * self.cross[i]),
        );
        let rhs = crate::sum::compensated_sum(
            (0..k).map(|i| (next - self.eigenvalues[i]) * self.norm_sq[i]),
        );
        Ok(InequalityCheck::new(k, lhs, rhs, tol))
    }
}

/// Decomposes `H = M^{-1/2} K M^{-1/2}` with Jacobi rotations and evaluates
/// the commutator terms for the multiplication operator `G = diag(g)`. In the
/// mass inner product, `M⁻¹K` and `H` are unitarily equivalent and `G`
/// commutes with `M`, so the terms are the same for both.
pub fn commutator_terms(stiffness: &DMatrix<f64>, mass: &[f64], g: &[f64]) -> Result<CommutatorTerms> {
    let n = stiffness.nrows();
    if stiffness.ncols() != n {
        return Err(Error::invalid("stiffness must be square"));
    }
    for (what, len) in [("mass", mass.len()), ("G", g.len())] {
        if len != n {
            return Err(Error::LengthMismatch {
                what,
                expected: n,
                actual: len,
            });
        }
    }
    let asym = (stiffness - stiffness.transpose()).amax();
    if asym > 1e-12 * stiffness.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    if mass.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::IndefiniteMass);
    }
    let d: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let h = DMatrix::from_fn(n, n, |i, j| d[i] * stiffness[(i, j)] * d[j]);
    let eig = jacobi_eigen(&h);
    let comm = DMatrix::from_fn(n, n, |i, j| h[(i, j)] * (g[j] - g[i]));
    let w = &comm * &eig.eigenvectors;
    let mut cross = Vec::with_capacity(n);
    let mut norm_sq = Vec::with_capacity(n);
    for i in 0..n {
        let v = eig.eigenvectors.column(i);
        let wi = w.column(i);
        cross.push(crate::sum::compensated_sum((0..n).map(|r| wi[r] * g[r] * v[r])));
        norm_sq.push(wi.norm_squared());
    }
    Ok(CommutatorTerms {
        eigenvalues: eig.eigenvalues.iter().copied().collect(),
        cross,
        norm_sq,
    })
}

/// The commutator inequality at a single index `k`.
pub fn commutator_lemma_check(
    stiffness: &DMatrix<f64>,
    mass: &[f64],
    g: &[f64],
    k: usize,
    tol: Tolerance,
) -> Result<InequalityCheck> {
    commutator_terms(stiffness, mass, g)?.check(k, tol)
}

/// The commutator inequality at every `k = 1..dim`, sharing one decomposition.
pub fn commutator_lemma_all(
    stiffness: &DMatrix<f64>,
    mass: &[f64],
    g: &[f64],
    tol: Tolerance,
) -> Result<Vec<InequalityCheck>> {
    let terms = commutator_terms(stiffness, mass, g)?;
    (1..terms.eigenvalues.len()).map(|k| terms.check(k, tol)).collect()
}

/// Exact slack `rhs − lhs` of a report, for display.
pub fn exact_slack(report: &SaturationReport) -> BigInt {
    &report.rhs - &report.lhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn documented_instances() {
        let r = saturation_at(2, 0).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (big(8), big(8)));
        let r = saturation_at(2, 1).unwrap();
        assert_eq!((r.k.clone(), r.lhs.clone(), r.rhs.clone()), (big(4), big(168), big(168)));
        let r = saturation_at(3, 0).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (big(27), big(27)));
    }

    #[test]
    fn saturation_sweep() {
        for n in 1..=6 {
            let reports = certify_saturation(n, 20).unwrap();
            assert_eq!(reports.len(), 21);
            assert!(reports.iter().all(|r| r.equal), "n = {n}");
        }
        assert!(certify_saturation(0, 3).is_err());
    }

    #[test]
    fn gap_shift_examples() {
        let zero = BigRational::zero();
        let a = certify_gap_shift(3, 4, &zero).unwrap();
        let b = saturation_at(3, 4).unwrap();
        assert!(a.equal);
        assert_eq!(a.lhs, b.lhs);
        for g in ["1/4", "-3/2", "0.25", "-2", "17/3"] {
            assert!(certify_gap_shift(2, 1, &parse_rational(g).unwrap()).unwrap().equal, "g = {g}");
        }
    }

    /// A wrong `δ` must break equality, so the check is not vacuous.
    #[test]
    fn perturbed_identity_is_detected() {
        let r = saturation_at(2, 3).unwrap();
        let spectrum = levels(2, 4).unwrap();
        let next = &spectrum[4].0;
        let perturbed: BigInt = spectrum[..4]
            .iter()
            .map(|(l, mu)| mu * (next - l) * (l * 4 + 5))
            .sum();
        assert_ne!(perturbed, r.rhs);
    }

    #[test]
    fn sweep_holds_at_every_index() {
        for n in 1..=4 {
            let reports = sphere_index_sweep(n, 200).unwrap();
            assert_eq!(reports.len(), 200);
            assert!(reports.iter().all(|r| r.satisfied));
            assert!(reports.iter().filter(|r| r.at_gap).all(|r| r.lhs == r.rhs));
        }
    }

    #[test]
    fn rational_parsing() {
        let q = |s: &str| parse_rational(s).unwrap();
        assert_eq!(q("0.25"), BigRational::new(big(1), big(4)));
        assert_eq!(q("-2"), BigRational::from_integer(big(-2)));
        assert_eq!(q("6/8"), BigRational::new(big(3), big(4)));
        assert_eq!(q("-1.5e-3"), BigRational::new(big(-3), big(2000)));
        assert_eq!(q("2e2"), BigRational::from_integer(big(200)));
        for bad in ["", "abc", "1/0", "1.2.3", "--1", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn identity_multiplier_gives_zero_sides() {
        let k = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        for c in commutator_lemma_all(&k, &[1.0; 3], &[1.0; 3], Tolerance::Absolute(0.0)).unwrap() {
            assert!(c.lhs.abs() < 1e-15 && c.rhs.abs() < 1e-15);
        }
    }

    #[test]
    fn commutator_rejects_bad_input() {
        let mut k = DMatrix::<f64>::identity(3, 3);
        k[(0, 2)] = 1.0;
        assert!(matches!(
            commutator_lemma_check(&k, &[1.0; 3], &[0.0, 1.0, 2.0], 1, Tolerance::Absolute(1e-10)),
            Err(Error::NotSymmetric(_))
        ));
        let k = DMatrix::<f64>::identity(3, 3);
        assert!(commutator_lemma_check(&k, &[1.0; 3], &[0.0; 3], 3, Tolerance::Absolute(1e-10)).is_err());
        assert!(commutator_lemma_check(&k, &[1.0; 2], &[0.0; 3], 1, Tolerance::Absolute(1e-10)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn commutator_holds_on_random_pencils(seed in any::<u64>(), dim in 2usize..20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
            let k = &b + b.transpose();
            let mass: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.2..3.0)).collect();
            let g: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            for c in commutator_lemma_all(&k, &mass, &g, Tolerance::Absolute(1e-10)).unwrap() {
                prop_assert!(c.satisfied, "k={} lhs={} rhs={}", c.k, c.lhs, c.rhs);
            }
        }

        #[test]
        fn random_shift_keeps_equality(n in 1u32..5, m in 0u32..8, p in -50i64..50, q in 1i64..20) {
            let g = BigRational::new(big(p), big(q));
            prop_assert!(certify_gap_shift(n, m, &g).unwrap().equal);
        }
    }
}
