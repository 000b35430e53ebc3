//! Universal eigenvalue inequalities for Laplace, Schrödinger and Kohn
//! operators, together with the discrete machinery needed to test them.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectra`]: closed-form sphere spectra, multiplicities, gap indices and
//!   the ambient constants for sphere and projective-space immersions.
//! - [`bounds`]: the inequalities themselves, evaluated as plain arithmetic
//!   over a spectral prefix.
//! - [`certifier`]: exact big-integer/rational verification of the sphere
//!   saturation identity, and the matrix form of the commutator lemma.
//! - [`geometry`]: triangle meshes, cotangent Laplace–Beltrami and
//!   Schrödinger operators, discrete mean curvature, and the finite-difference
//!   Kohn sublaplacian on Heisenberg boxes.
//! - [`eigensolve`]: block LOBPCG for the smallest generalized eigenpairs and
//!   a dense reference solver.
//! - [`verify`]: end-to-end verification pipelines and their reports (what the
//!   `spectral-bounds` binary runs).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod certifier;
pub mod eigensolve;
mod error;
pub mod geometry;
pub mod linalg;
pub mod spectra;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
