//! Sparse symmetric storage and a dense Jacobi eigensolver.

mod jacobi;
mod sparse;

pub use jacobi::{jacobi_eigen, JacobiEigen};
pub use sparse::{SymmetricAssembler, SymmetricCsr};
