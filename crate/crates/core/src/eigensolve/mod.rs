//! Smallest eigenpairs of the symmetric generalized problem `K u = λ M u`
//! with a diagonal (lumped) mass matrix.
//!
//! [`solve_smallest`] is a block LOBPCG iteration; [`dense_solve`] computes
//! the full spectrum of a small dense pencil and is used as a reference.

mod dense;
mod lobpcg;

pub use dense::{dense_solve, DENSE_DIMENSION_CAP};
pub use lobpcg::{solve_smallest, solve_smallest_pencil};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Convergence threshold on `‖Âŷ − λŷ‖ / max(1, |λ|)`, where `Â` is the
    /// mass-symmetrized operator `M^{-1/2} K M^{-1/2}` and `ŷ = M^{1/2} u`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Extra block vectors beyond the requested count; `None` picks
    /// `max(4, k/4)`.
    pub extra_vectors: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 500,
            seed: 42,
            extra_vectors: None,
        }
    }
}

/// Eigenpairs sorted ascending, with `M`-orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub eigenvalues: Vec<f64>,
    /// One column per eigenvalue.
    pub eigenvectors: DMatrix<f64>,
    /// Relative residual of each pair, in the sense of
    /// [`SolverOptions::tol`].
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged_count: usize,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `max |⟨u_i, M u_j⟩ − δ_ij|`.
    pub fn mass_orthonormality_error(&self, mass: &[f64]) -> f64 {
        let u = &self.eigenvectors;
        let mut worst = 0.0f64;
        for i in 0..u.ncols() {
            for j in 0..=i {
                let dot: f64 = (0..u.nrows()).map(|r| u[(r, i)] * mass[r] * u[(r, j)]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Unscaled residual norms `‖K u − λ M u‖ / ‖u‖`.
    pub fn raw_residuals(&self, stiffness: &crate::linalg::SymmetricCsr, mass: &[f64]) -> Vec<f64> {
        let ku = stiffness.mul_block(&self.eigenvectors);
        (0..self.len())
            .map(|j| {
                let col = self.eigenvectors.column(j);
                let lam = self.eigenvalues[j];
                let r: f64 = (0..col.len())
                    .map(|i| (ku[(i, j)] - lam * mass[i] * col[i]).powi(2))
                    .sum();
                r.sqrt() / col.norm()
            })
            .collect()
    }
}
