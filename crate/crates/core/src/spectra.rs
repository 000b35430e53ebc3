//! Closed-form spectra of round spheres and the ambient constants used for
//! immersions into spheres and projective spaces.
//!
//! The unit sphere `S^n` has Laplace eigenvalues `ℓ(ℓ + n − 1)` with
//! multiplicity `C(n+ℓ, n) − C(n+ℓ−2, n)`. All combinatorics here is exact
//! (big integers); only [`curvature_lift`] takes measured, floating-point
//! curvature.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Where an [`EigenvalueSequence`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumOrigin {
    ClosedFormSphere,
    Computed,
    UserSupplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralLevel<T> {
    pub value: T,
    pub multiplicity: u64,
}

/// A nondecreasing spectrum grouped into distinct levels.
///
/// Closed-form sphere spectra use `T = BigInt`; computed spectra use `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueSequence<T> {
    entries: Vec<SpectralLevel<T>>,
    origin: SpectrumOrigin,
    dimension: u32,
}

impl<T> EigenvalueSequence<T> {
    pub fn entries(&self) -> &[SpectralLevel<T>] {
        &self.entries
    }

    pub fn origin(&self) -> SpectrumOrigin {
        self.origin
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    /// Total number of eigenvalues counted with multiplicity.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }
}

impl<T: Clone> EigenvalueSequence<T> {
    /// Eigenvalues repeated according to multiplicity, truncated to `limit`.
    pub fn expanded(&self, limit: usize) -> Vec<T> {
        let mut out = Vec::new();
        for e in &self.entries {
            for _ in 0..e.multiplicity {
                if out.len() == limit {
                    return out;
                }
                out.push(e.value.clone());
            }
        }
        out
    }
}

impl EigenvalueSequence<BigInt> {
    pub fn to_f64(&self) -> EigenvalueSequence<f64> {
        EigenvalueSequence {
            entries: self
                .entries
                .iter()
                .map(|e| SpectralLevel {
                    value: e.value.to_f64().unwrap_or(f64::INFINITY),
                    multiplicity: e.multiplicity,
                })
                .collect(),
            origin: self.origin,
            dimension: self.dimension,
        }
    }

    /// Checks the ordering invariants and, for closed-form sphere spectra,
    /// that every level matches `ℓ(ℓ+n−1)` with multiplicity `μ_{n,ℓ}`.
    pub fn validate(&self) -> Result<()> {
        check_levels(&self.entries, |a, b| a < b)?;
        if self.origin == SpectrumOrigin::ClosedFormSphere {
            for (level, e) in self.entries.iter().enumerate() {
                let level = level as u32;
                let value = sphere_eigenvalue(self.dimension, level)?;
                let mult = sphere_multiplicity(self.dimension, level)?;
                if e.value != value || BigInt::from(e.multiplicity) != mult {
                    return Err(Error::invalid(format!(
                        "level {level} does not match the closed-form sphere spectrum"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl EigenvalueSequence<f64> {
    /// Groups a nondecreasing list into levels; values within
    /// `cluster_tol · max(1, |λ|)` of the current level are merged.
    pub fn from_values(
        values: &[f64],
        origin: SpectrumOrigin,
        dimension: u32,
        cluster_tol: f64,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("eigenvalues must be finite"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("eigenvalues must be nondecreasing"));
        }
        let mut entries: Vec<SpectralLevel<f64>> = Vec::new();
        for &v in values {
            match entries.last_mut() {
                Some(last) if (v - last.value).abs() <= cluster_tol * last.value.abs().max(1.0) => {
                    last.multiplicity += 1;
                }
                _ => entries.push(SpectralLevel {
                    value: v,
                    multiplicity: 1,
                }),
            }
        }
        Ok(Self {
            entries,
            origin,
            dimension,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_levels(&self.entries, |a, b| a < b)
    }
}

fn check_levels<T>(entries: &[SpectralLevel<T>], less: impl Fn(&T, &T) -> bool) -> Result<()> {
    if entries.iter().any(|e| e.multiplicity == 0) {
        return Err(Error::invalid("multiplicities must be positive"));
    }
    if entries.windows(2).any(|w| !less(&w[0].value, &w[1].value)) {
        return Err(Error::invalid("levels must be strictly increasing"));
    }
    Ok(())
}

fn require_dimension(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("dimension n must be at least 1"))
    } else {
        Ok(())
    }
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `ℓ(ℓ + n − 1)`, the `ℓ`-th distinct eigenvalue of the unit `n`-sphere.
pub fn sphere_eigenvalue(n: u32, level: u32) -> Result<BigInt> {
    require_dimension(n)?;
    let l = BigInt::from(level);
    Ok(&l * (&l + n - 1u32))
}

/// Multiplicity `μ_{n,ℓ}` of the level-`ℓ` sphere eigenvalue.
pub fn sphere_multiplicity(n: u32, level: u32) -> Result<BigInt> {
    require_dimension(n)?;
    let (n, l) = (u64::from(n), u64::from(level));
    Ok(match l {
        0 => BigInt::one(),
        1 => BigInt::from(n + 1),
        _ => BigInt::from(binomial(n + l, n)) - BigInt::from(binomial(n + l - 2, n)),
    })
}

/// The first `count` distinct levels of the unit `n`-sphere spectrum.
pub fn sphere_spectrum(n: u32, count: usize) -> Result<EigenvalueSequence<BigInt>> {
    require_dimension(n)?;
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    let entries = (0..count as u32)
        .map(|l| {
            let multiplicity = sphere_multiplicity(n, l)?
                .to_u64()
                .ok_or_else(|| Error::invalid("multiplicity overflows u64"))?;
            Ok(SpectralLevel {
                value: sphere_eigenvalue(n, l)?,
                multiplicity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenvalueSequence {
        entries,
        origin: SpectrumOrigin::ClosedFormSphere,
        dimension: n,
    })
}

/// Index `k` after which the sphere spectrum jumps from level `m` to `m+1`:
/// `k = ((n + 2m)/n)·C(n + m − 1, m) = Σ_{ℓ≤m} μ_{n,ℓ}`.
pub fn gap_index(n: u32, m: u32) -> Result<BigInt> {
    require_dimension(n)?;
    let numerator =
        BigInt::from(n + 2 * m) * BigInt::from(binomial(u64::from(n + m - 1), u64::from(m)));
    let (q, r) = numerator.div_rem(&BigInt::from(n));
    debug_assert!(r.is_zero());
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AmbientSpace {
    Sphere,
    RealProjective,
    ComplexProjective,
    QuaternionicProjective,
}

impl AmbientSpace {
    /// `dim_R F` for projective spaces over `F`; `None` for the sphere.
    pub fn field_dimension(self) -> Option<u32> {
        match self {
            AmbientSpace::Sphere => None,
            AmbientSpace::RealProjective => Some(1),
            AmbientSpace::ComplexProjective => Some(2),
            AmbientSpace::QuaternionicProjective => Some(4),
        }
    }
}

/// Special immersions into `CP^m` for which a smaller constant applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SharpCase {
    /// `M` odd-dimensional: `c'(n) = 2n(n + 2 − 1/n)`.
    OddDimensional,
    /// `X(M)` totally real (`J^T = 0`): `c'(n) = 2n(n + 1)`.
    TotallyReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbientConstants {
    pub space: AmbientSpace,
    pub n: u32,
    pub d: Option<u32>,
    pub c: BigInt,
    pub c_sharp: Option<BigInt>,
}

impl AmbientConstants {
    /// The constant to use in bounds: `c'(n)` when asserted, else `c(n)`.
    pub fn effective(&self) -> &BigInt {
        self.c_sharp.as_ref().unwrap_or(&self.c)
    }

    pub fn effective_f64(&self) -> f64 {
        self.effective().to_f64().unwrap_or(f64::INFINITY)
    }

    /// Attaches the sharper constant for a geometric situation the caller
    /// asserts holds.
    pub fn with_sharp(mut self, case: SharpCase) -> Result<Self> {
        if self.space != AmbientSpace::ComplexProjective {
            return Err(Error::invalid(
                "sharper constants are only available for CP^m",
            ));
        }
        let n = BigInt::from(self.n);
        let sharp = match case {
            SharpCase::OddDimensional => {
                if self.n.is_multiple_of(2) {
                    return Err(Error::invalid(
                        "odd-dimensional constant requested for even n",
                    ));
                }
                // 2n(n + 2 − 1/n) = 2n² + 4n − 2
                BigInt::from(2) * &n * &n + BigInt::from(4) * &n - 2
            }
            SharpCase::TotallyReal => BigInt::from(2) * &n * (&n + 1),
        };
        debug_assert!(sharp <= self.c);
        self.c_sharp = Some(sharp);
        Ok(self)
    }
}

/// `c(n) = n²` for spheres and `2n(n + d(F))` for `FP^m`.
pub fn ambient_constant(space: AmbientSpace, n: u32) -> Result<AmbientConstants> {
    require_dimension(n)?;
    let nn = BigInt::from(n);
    let d = space.field_dimension();
    let c = match d {
        None => &nn * &nn,
        Some(d) => BigInt::from(2) * &nn * (&nn + d),
    };
    Ok(AmbientConstants {
        space,
        n,
        d,
        c,
        c_sharp: None,
    })
}

/// Squared mean curvature of the composed immersion into Euclidean space,
/// `|h'|²`, given the curvature `|h|²` inside the ambient space.
///
/// For `CP^m` the optional argument is `‖J^T‖² ∈ [0, n]`, for `QP^m` it is
/// `Σ_r ‖J_r^T‖² ∈ [0, 3n]`. When it is absent the extremal value is used,
/// so the result equals `|h|² + c(n)`.
pub fn curvature_lift(
    h_sq: f64,
    space: AmbientSpace,
    n: u32,
    tangential_norm_sq: Option<f64>,
) -> Result<f64> {
    require_dimension(n)?;
    if !(h_sq >= 0.0) || !h_sq.is_finite() {
        return Err(Error::invalid("h_sq must be finite and nonnegative"));
    }
    let nf = f64::from(n);
    let base = 2.0 * nf * (nf + 1.0);
    let with_tangential = |max: f64| -> Result<f64> {
        match tangential_norm_sq {
            None => Ok(h_sq + base + 2.0 * max),
            Some(t) if (0.0..=max).contains(&t) => Ok(h_sq + base + 2.0 * t),
            Some(t) => Err(Error::invalid(format!(
                "tangential norm {t} outside [0, {max}]"
            ))),
        }
    };
    match space {
        AmbientSpace::Sphere | AmbientSpace::RealProjective if tangential_norm_sq.is_some() => Err(
            Error::invalid("tangential norm only applies to CP^m and QP^m"),
        ),
        AmbientSpace::Sphere => Ok(h_sq + nf * nf),
        AmbientSpace::RealProjective => Ok(h_sq + base),
        AmbientSpace::ComplexProjective => with_tangential(nf),
        AmbientSpace::QuaternionicProjective => with_tangential(3.0 * nf),
    }
}
