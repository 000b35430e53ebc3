//! Dirichlet eigenvalues of the Kohn sublaplacian on domains of the
//! Heisenberg group `H^n`.

use serde::Serialize;

use super::{yang_sides, BoundResult, InequalityCheck, SpectralData, Tolerance};
use crate::sum::compensated_sum;
use crate::{Error, Result};

/// `n Σ(λ_{k+1}−λ_i)² ≤ 2 Σ(λ_{k+1}−λ_i)λ_i`, with `n` the Heisenberg
/// parameter stored in `data`.
pub fn heisenberg_yang_check(data: &SpectralData, tol: Tolerance) -> Result<InequalityCheck> {
    let next = data.require_next()?;
    if data.lambdas()[0] <= 0.0 {
        return Err(Error::invalid(
            "Dirichlet sublaplacian eigenvalues must be positive (λ_1 ≤ 0)",
        ));
    }
    let (lhs, rhs) = yang_sides(
        data.lambdas(),
        next,
        std::iter::repeat(0.0),
        f64::from(data.n()),
        2.0,
    );
    Ok(InequalityCheck::new(data.k(), lhs, rhs, tol))
}

/// `((n+1)/(nk))Σλ_i ∓ √D̃` with
/// `D̃ = ((1+1/n)(1/k)Σλ_i)² − (1+2/n)(1/k)Σλ_i²`.
pub fn heisenberg_bounds(data: &SpectralData) -> BoundResult {
    let n = f64::from(data.n());
    let k = data.k() as f64;
    let mean = data.sum_lambda() / k;
    let mean_sq = compensated_sum(data.lambdas().iter().map(|l| l * l)) / k;
    let center = (1.0 + 1.0 / n) * mean;
    let discriminant = compensated_sum([center * center, -(1.0 + 2.0 / n) * mean_sq]);
    BoundResult::from_center(center, discriminant)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeisenbergSimple {
    /// `(1/k + 2/(nk))Σλ_i`.
    pub bound: f64,
    /// The PPW-type bound `λ_k + (2/(nk))Σλ_i` it improves on.
    pub ppw_comparison: f64,
}

pub fn heisenberg_simple(data: &SpectralData) -> HeisenbergSimple {
    let n = f64::from(data.n());
    let k = data.k() as f64;
    let sum = data.sum_lambda();
    let last = data.lambdas()[data.k() - 1];
    HeisenbergSimple {
        bound: (1.0 / k + 2.0 / (n * k)) * sum,
        ppw_comparison: last + 2.0 / (n * k) * sum,
    }
}
