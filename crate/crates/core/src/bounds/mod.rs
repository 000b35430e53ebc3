//! Universal eigenvalue inequalities evaluated over a spectral prefix.
//!
//! Everything here is arithmetic on numbers the caller supplies: a prefix
//! `λ_1 ≤ … ≤ λ_k`, optionally `λ_{k+1}`, and the curvature/potential
//! integrals `δ_i` (or a uniform bound `δ`). Whether those numbers come from
//! a closed form or from a discretization is the caller's business; the
//! tolerance carried by each [`InequalityCheck`] records how strictly the
//! inequality was applied.

mod eigenmap;
mod heisenberg;
mod submanifold;

pub use eigenmap::{eigenmap_bounds, eigenmap_check};
pub use heisenberg::{heisenberg_bounds, heisenberg_simple, heisenberg_yang_check, HeisenbergSimple};
pub use submanifold::{
    ambient_deltas, immersion_curvature_floor, quadratic_bounds, quadratic_polynomial,
    reilly_chain, reilly_constant, reilly_first, simple_upper, yang_check, yang_check_simple,
    CurvatureFloor, ReillyChain,
};

use serde::{Deserialize, Serialize};

use crate::sum::compensated_sum;
use crate::{Error, Result};

/// Relative tolerance used for closed-form (exact) input.
pub const CLOSED_FORM_TOLERANCE: Tolerance = Tolerance::Relative(1e-9);

/// How much negative slack a check may show and still count as satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Tolerance {
    /// Fraction of the check's natural scale (the larger side, or the
    /// eigenvalue being bracketed).
    Relative(f64),
    Absolute(f64),
}

impl Tolerance {
    pub fn resolve(self, scale: f64) -> f64 {
        match self {
            Tolerance::Relative(r) => r * scale.abs(),
            Tolerance::Absolute(a) => a,
        }
    }
}

/// One evaluated inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub satisfied: bool,
}

impl InequalityCheck {
    /// `lhs ≤ rhs` with a relative tolerance scaled by `max(|lhs|, |rhs|)`.
    pub fn new(k: usize, lhs: f64, rhs: f64, tol: Tolerance) -> Self {
        Self::with_scale(k, lhs, rhs, tol, lhs.abs().max(rhs.abs()))
    }

    pub fn with_scale(k: usize, lhs: f64, rhs: f64, tol: Tolerance, scale: f64) -> Self {
        let slack = rhs - lhs;
        let tolerance = tol.resolve(scale);
        Self {
            k,
            lhs,
            rhs,
            slack,
            tolerance,
            satisfied: slack >= -tolerance,
        }
    }
}

/// Lower/upper roots of a quadratic eigenvalue bound and its discriminant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub lower: f64,
    pub upper: f64,
    pub center: f64,
    pub discriminant: f64,
    pub feasible: bool,
}

impl BoundResult {
    /// Roots `center ± √D`. A slightly negative `D` within `1e-9·center²`
    /// counts as feasible (a double root); below that the bracket collapses
    /// to the center and `feasible` is false.
    pub(crate) fn from_center(center: f64, discriminant: f64) -> Self {
        let tol = 1e-9 * center * center;
        let feasible = discriminant >= -tol;
        let half = discriminant.max(0.0).sqrt();
        Self {
            lower: center - half,
            upper: center + half,
            center,
            discriminant,
            feasible,
        }
    }

    pub fn contains(&self, value: f64, tol: Tolerance) -> bool {
        self.bracket_check(0, value, tol).satisfied
    }

    /// Containment of `value` in `[lower, upper]` as an inequality
    /// `|value − center| ≤ √D`; the slack is the distance to the nearer end.
    /// Relative tolerances scale with `|value|`.
    pub fn bracket_check(&self, k: usize, value: f64, tol: Tolerance) -> InequalityCheck {
        let half = if self.feasible {
            self.discriminant.max(0.0).sqrt()
        } else {
            0.0
        };
        InequalityCheck::with_scale(k, (value - self.center).abs(), half, tol, value)
    }
}

/// A spectral prefix with the side data the inequalities need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    n: u32,
    lambdas: Vec<f64>,
    deltas: Option<Vec<f64>>,
    delta_sup: Option<f64>,
    next_eigenvalue: Option<f64>,
}

impl SpectralData {
    pub fn new(n: u32, lambdas: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension n must be at least 1"));
        }
        if lambdas.is_empty() {
            return Err(Error::invalid("need at least one eigenvalue (k ≥ 1)"));
        }
        if lambdas.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("eigenvalues must be finite"));
        }
        if lambdas.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("eigenvalues must be nondecreasing"));
        }
        Ok(Self {
            n,
            lambdas,
            deltas: None,
            delta_sup: None,
            next_eigenvalue: None,
        })
    }

    /// Splits `values = [λ_1, …, λ_{k+1}]` into a prefix of length `k` and
    /// the next eigenvalue.
    pub fn from_prefix(n: u32, values: &[f64], k: usize) -> Result<Self> {
        if k == 0 || values.len() < k + 1 {
            return Err(Error::invalid(format!(
                "need {} eigenvalues for k = {k}, got {}",
                k + 1,
                values.len()
            )));
        }
        Self::new(n, values[..k].to_vec())?.with_next(values[k])
    }

    pub fn with_deltas(mut self, deltas: Vec<f64>) -> Result<Self> {
        if deltas.len() != self.lambdas.len() {
            return Err(Error::LengthMismatch {
                what: "deltas",
                expected: self.lambdas.len(),
                actual: deltas.len(),
            });
        }
        if deltas.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("deltas must be finite"));
        }
        self.deltas = Some(deltas);
        self.check_delta_order()?;
        Ok(self)
    }

    pub fn with_delta_sup(mut self, delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::invalid("delta_sup must be finite"));
        }
        self.delta_sup = Some(delta);
        self.check_delta_order()?;
        Ok(self)
    }

    pub fn with_next(mut self, next: f64) -> Result<Self> {
        if !next.is_finite() {
            return Err(Error::invalid("next eigenvalue must be finite"));
        }
        let last = *self.lambdas.last().expect("nonempty");
        if next < last {
            return Err(Error::invalid(format!(
                "λ_(k+1) = {next} is below λ_k = {last}"
            )));
        }
        self.next_eigenvalue = Some(next);
        Ok(self)
    }

    fn check_delta_order(&self) -> Result<()> {
        if let (Some(ds), Some(sup)) = (&self.deltas, self.delta_sup) {
            let slack = 1e-12 * sup.abs().max(1.0);
            if let Some(d) = ds.iter().find(|&&d| d > sup + slack) {
                return Err(Error::invalid(format!(
                    "δ_i = {d} exceeds the uniform bound δ = {sup}"
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn deltas(&self) -> Option<&[f64]> {
        self.deltas.as_deref()
    }

    pub fn delta_sup(&self) -> Option<f64> {
        self.delta_sup
    }

    pub fn next_eigenvalue(&self) -> Option<f64> {
        self.next_eigenvalue
    }

    pub(crate) fn require_deltas(&self) -> Result<&[f64]> {
        self.deltas.as_deref().ok_or(Error::MissingData("deltas"))
    }

    pub(crate) fn require_next(&self) -> Result<f64> {
        self.next_eigenvalue
            .ok_or(Error::MissingData("next eigenvalue λ_(k+1)"))
    }

    pub(crate) fn require_delta_sup(&self) -> Result<f64> {
        self.delta_sup.ok_or(Error::MissingData("delta_sup"))
    }

    pub(crate) fn sum_lambda(&self) -> f64 {
        compensated_sum(self.lambdas.iter().copied())
    }
}

/// Both sides of `a·Σ(Λ−λ_i)² ≤ b·Σ(Λ−λ_i)(λ_i + s_i)` with compensated sums.
pub(crate) fn yang_sides(
    lambdas: &[f64],
    next: f64,
    shifts: impl Iterator<Item = f64>,
    lhs_factor: f64,
    rhs_factor: f64,
) -> (f64, f64) {
    let lhs = compensated_sum(lambdas.iter().map(|&l| (next - l) * (next - l)));
    let rhs = compensated_sum(
        lambdas
            .iter()
            .zip(shifts)
            .map(|(&l, s)| (next - l) * (l + s)),
    );
    (lhs_factor * lhs, rhs_factor * rhs)
}
