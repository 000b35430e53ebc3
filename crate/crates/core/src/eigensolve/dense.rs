//! Full spectrum of a small dense pencil, used as a reference solution.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use super::EigenSolution;
use crate::{Error, Result};

pub const DENSE_DIMENSION_CAP: usize = 2000;

/// All eigenpairs of `K u = λ M u` for symmetric `K` and symmetric positive
/// definite `M`, via Cholesky reduction `L⁻¹ K L⁻ᵀ` and a dense symmetric
/// eigendecomposition.
pub fn dense_solve(stiffness: &DMatrix<f64>, mass: &DMatrix<f64>) -> Result<EigenSolution> {
    let n = stiffness.nrows();
    if stiffness.ncols() != n || mass.nrows() != n || mass.ncols() != n {
        return Err(Error::invalid("stiffness and mass must be square of equal size"));
    }
    if n > DENSE_DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: DENSE_DIMENSION_CAP,
        });
    }
    if n == 0 {
        return Err(Error::EmptyOperator);
    }
    for m in [stiffness, mass] {
        let asym = (m - m.transpose()).amax();
        if asym > 1e-12 * m.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
    }
    let chol = Cholesky::new(mass.clone()).ok_or(Error::IndefiniteMass)?;
    let l = chol.l();
    let half = l
        .solve_lower_triangular(stiffness)
        .ok_or(Error::IndefiniteMass)?;
    let reduced = l
        .solve_lower_triangular(&half.transpose())
        .ok_or(Error::IndefiniteMass)?;
    let reduced = (&reduced + reduced.transpose()) * 0.5;

    let eig = SymmetricEigen::new(reduced.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let y = eig.eigenvectors.select_columns(order.iter());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let ay = &reduced * &y;
    let residuals = (0..n)
        .map(|j| (ay.column(j) - y.column(j) * eigenvalues[j]).norm() / eigenvalues[j].abs().max(1.0))
        .collect();
    let u = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(Error::IndefiniteMass)?;
    Ok(EigenSolution {
        eigenvalues,
        eigenvectors: u,
        residuals,
        iterations: 0,
        converged_count: n,
    })
}
