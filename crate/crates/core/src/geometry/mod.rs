//! Discrete operators: cotangent Laplace–Beltrami and Schrödinger operators
//! on immersed triangle meshes, and the Kohn sublaplacian on Heisenberg
//! boxes.

mod heisenberg;
mod mesh;
mod off;
mod operator;

pub use heisenberg::{assemble_heisenberg, HeisenbergGrid};
pub use mesh::{
    clifford_torus, disc, ellipsoid, flat_torus, icosphere, spherical_cap, TriangleMesh,
    DEGENERATE_AREA_RATIO,
};
pub use off::{load_off, parse_off, save_off, to_off};
pub use operator::{
    apply_dirichlet, assemble_laplacian, delta_integrals, export_operator, mean_curvature,
    schrodinger, DeltaIntegrals, DiscreteOperator, ImmersionGeometry,
};
