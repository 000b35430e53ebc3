//! Cotangent finite elements: Laplace–Beltrami and Schrödinger operators,
//! discrete mean curvature, and the quadratures the inequalities need.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::mesh::{diff, dot, TriangleMesh};
use crate::linalg::{SymmetricAssembler, SymmetricCsr};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Assembled pencil `(K, M)` representing `−Δ + q` with a lumped mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    /// `K_Δ + M·diag(q)`.
    pub stiffness: SymmetricCsr,
    /// Diagonal of the lumped mass matrix.
    pub mass: Vec<f64>,
    /// Potential value per unknown.
    pub potential: Vec<f64>,
    /// Unknown index to degree of freedom of the unreduced operator.
    pub interior_map: Vec<usize>,
    /// Degrees of freedom before Dirichlet elimination.
    pub full_size: usize,
    /// Dimension of the underlying manifold (2 for surfaces).
    pub intrinsic_dim: u32,
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn boundary_size(&self) -> usize {
        self.full_size - self.dim()
    }

    /// Total mass `Σ M_vv`.
    pub fn volume(&self) -> f64 {
        crate::sum::compensated_sum(self.mass.iter().copied())
    }

    /// Restricts a per-dof field of the unreduced operator to the unknowns.
    pub fn restrict(&self, full: &[f64]) -> Result<Vec<f64>> {
        if full.len() != self.full_size {
            return Err(Error::LengthMismatch {
                what: "per-vertex field",
                expected: self.full_size,
                actual: full.len(),
            });
        }
        Ok(self.interior_map.iter().map(|&d| full[d]).collect())
    }
}

/// Local stiffness of one triangle: `K_ij = −½ cot θ_k` for `i ≠ j`, with
/// `θ_k` the angle opposite edge `ij`, and zero row sums.
fn element_stiffness(p: [&[f64]; 3]) -> [[f64; 3]; 3] {
    let mut k = [[0.0; 3]; 3];
    for corner in 0..3 {
        let i = (corner + 1) % 3;
        let j = (corner + 2) % 3;
        let u = diff(p[i], p[corner]);
        let v = diff(p[j], p[corner]);
        let uv = dot(&u, &v);
        let cot = uv / ((dot(&u, &u) * dot(&v, &v) - uv * uv).sqrt());
        let w = 0.5 * cot;
        k[i][j] -= w;
        k[j][i] -= w;
        k[i][i] += w;
        k[j][j] += w;
    }
    k
}

fn triangle_points(mesh: &TriangleMesh, t: usize) -> [&[f64]; 3] {
    mesh.triangles()[t].map(|v| mesh.vertex(v))
}

/// Cotangent stiffness and lumped mass on the merged degrees of freedom.
pub fn assemble_laplacian(mesh: &TriangleMesh) -> Result<DiscreteOperator> {
    let n = mesh.num_dofs();
    let mut asm = SymmetricAssembler::new(n);
    let mut mass = vec![CompensatedSum::new(); n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        if !(area > 0.0) {
            return Err(Error::DegenerateTriangle { index: t, area });
        }
        let k = element_stiffness(triangle_points(mesh, t));
        let d = tri.map(|v| mesh.dof_of(v));
        for a in 0..3 {
            mass[d[a]].add(area / 3.0);
            for b in a..3 {
                asm.add(d[a], d[b], k[a][b]);
            }
        }
    }
    Ok(DiscreteOperator {
        stiffness: asm.finish(),
        mass: mass.iter().map(CompensatedSum::value).collect(),
        potential: vec![0.0; n],
        interior_map: (0..n).collect(),
        full_size: n,
        intrinsic_dim: 2,
    })
}

/// Removes the rows and columns of the listed degrees of freedom (numbered as
/// in the unreduced operator).
pub fn apply_dirichlet(op: &DiscreteOperator, boundary: &[usize]) -> Result<DiscreteOperator> {
    let mut drop = vec![false; op.full_size];
    for &b in boundary {
        if b >= op.full_size {
            return Err(Error::invalid(format!(
                "boundary index {b} out of range for {} vertices",
                op.full_size
            )));
        }
        drop[b] = true;
    }
    let keep: Vec<usize> = (0..op.dim()).filter(|&i| !drop[op.interior_map[i]]).collect();
    if keep.is_empty() {
        return Err(Error::EmptyOperator);
    }
    Ok(DiscreteOperator {
        stiffness: op.stiffness.principal_submatrix(&keep),
        mass: keep.iter().map(|&i| op.mass[i]).collect(),
        potential: keep.iter().map(|&i| op.potential[i]).collect(),
        interior_map: keep.iter().map(|&i| op.interior_map[i]).collect(),
        full_size: op.full_size,
        intrinsic_dim: op.intrinsic_dim,
    })
}

/// Replaces the potential: the stiffness becomes `K_Δ + M·diag(q)`. `q` may
/// be given per unknown or per degree of freedom of the unreduced operator.
pub fn schrodinger(op: &DiscreteOperator, q: &[f64]) -> Result<DiscreteOperator> {
    let q = if q.len() == op.dim() {
        q.to_vec()
    } else if q.len() == op.full_size {
        op.restrict(q)?
    } else {
        return Err(Error::LengthMismatch {
            what: "potential",
            expected: op.dim(),
            actual: q.len(),
        });
    };
    if q.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("potential values must be finite"));
    }
    let shift: Vec<f64> = (0..op.dim())
        .map(|i| op.mass[i] * (q[i] - op.potential[i]))
        .collect();
    Ok(DiscreteOperator {
        stiffness: op.stiffness.add_diagonal(&shift),
        potential: q,
        ..op.clone()
    })
}

/// Discrete mean curvature of the immersion and the isometry identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmersionGeometry {
    /// `h_v = (ΔX)_v = −(M⁻¹ K X)_v`, one vector in `R^m` per degree of freedom.
    pub mean_curvature: Vec<Vec<f64>>,
    pub h_sq: Vec<f64>,
    /// Per degree of freedom, the largest deviation from `n` of
    /// `Σ_α |∇X_α|²` over the incident triangles.
    pub isometry_residual: Vec<f64>,
    /// Per triangle, `Σ_α |∇X_α|²` of the piecewise-linear coordinates.
    pub triangle_energy_density: Vec<f64>,
}

impl ImmersionGeometry {
    pub fn max_h_sq(&self) -> f64 {
        self.h_sq.iter().fold(0.0f64, |a, &b| a.max(b))
    }

    /// `(1/V) ∫ |h|²` with the lumped mass of `op`.
    pub fn mean_h_sq(&self, op: &DiscreteOperator) -> f64 {
        let total: f64 = crate::sum::compensated_sum(
            op.interior_map
                .iter()
                .zip(&op.mass)
                .map(|(&d, &m)| m * self.h_sq[d]),
        );
        total / op.volume()
    }
}

/// Mean curvature vector `ΔX` per degree of freedom. Contributions are
/// accumulated per element from coordinate differences, so periodic copies of
/// a vertex are handled consistently.
pub fn mean_curvature(mesh: &TriangleMesh, op: &DiscreteOperator) -> Result<ImmersionGeometry> {
    let n = mesh.num_dofs();
    if op.full_size != n || op.dim() != n {
        return Err(Error::invalid(
            "mean curvature needs the unreduced operator assembled from this mesh",
        ));
    }
    let m = mesh.ambient_dim();
    let mut kx = vec![vec![CompensatedSum::new(); m]; n];
    let mut worst = vec![0.0f64; n];
    let mut density = Vec::with_capacity(mesh.triangles().len());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = triangle_points(mesh, t);
        let k = element_stiffness(p);
        let area = mesh.triangle_area(t);
        let mut energy = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                // Row sums vanish, so K·X equals K·(X − X_a) inside the element.
                let rel = diff(p[b], p[a]);
                let d = mesh.dof_of(tri[a]);
                for (axis, r) in rel.iter().enumerate() {
                    kx[d][axis].add(k[a][b] * r);
                }
                energy += k[a][b] * dot(p[a], p[b]);
            }
        }
        let value = energy / area;
        density.push(value);
        for &v in tri {
            let d = mesh.dof_of(v);
            worst[d] = worst[d].max((value - 2.0).abs());
        }
    }
    let mean_curvature: Vec<Vec<f64>> = (0..n)
        .map(|d| kx[d].iter().map(|s| -s.value() / op.mass[d]).collect())
        .collect();
    let h_sq = mean_curvature.iter().map(|h| dot(h, h)).collect();
    Ok(ImmersionGeometry {
        mean_curvature,
        h_sq,
        isometry_residual: worst,
        triangle_energy_density: density,
    })
}

/// Lumped-mass quadratures of the eigenfunctions against the curvature and
/// the potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaIntegrals {
    /// `δ_i = ∫ (|h|²/4 − q) u_i²`.
    pub deltas: Vec<f64>,
    /// `∫ q u_i²`.
    pub q_integrals: Vec<f64>,
    /// `∫ |h|² u_i²`.
    pub h_sq_integrals: Vec<f64>,
}

/// `eigenvectors` are columns over the unknowns of `op`, normalized in the
/// mass inner product; `h_sq` is given per degree of freedom of the
/// unreduced operator.
pub fn delta_integrals(op: &DiscreteOperator, eigenvectors: &DMatrix<f64>, h_sq: &[f64]) -> Result<DeltaIntegrals> {
    if eigenvectors.nrows() != op.dim() {
        return Err(Error::LengthMismatch {
            what: "eigenvector length",
            expected: op.dim(),
            actual: eigenvectors.nrows(),
        });
    }
    let h = op.restrict(h_sq)?;
    // Each quadrature is divided by ∫u_i², which is 1 up to the solver's
    // orthonormality error, so that δ_i never exceeds sup(|h|²/4 − q).
    let norms: Vec<f64> = (0..eigenvectors.ncols())
        .map(|j| crate::sum::compensated_sum((0..op.dim()).map(|v| op.mass[v] * eigenvectors[(v, j)].powi(2))))
        .collect();
    let integrate = |weight: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..eigenvectors.ncols())
            .map(|j| {
                crate::sum::compensated_sum(
                    (0..op.dim()).map(|v| op.mass[v] * weight(v) * eigenvectors[(v, j)].powi(2)),
                ) / norms[j]
            })
            .collect()
    };
    let q_integrals = integrate(&|v| op.potential[v]);
    let h_sq_integrals = integrate(&|v| h[v]);
    let deltas = h_sq_integrals
        .iter()
        .zip(&q_integrals)
        .map(|(hh, q)| hh / 4.0 - q)
        .collect();
    Ok(DeltaIntegrals {
        deltas,
        q_integrals,
        h_sq_integrals,
    })
}

#[derive(Debug, Serialize)]
struct OperatorSidecar<'a> {
    n: u32,
    vertex_count: usize,
    boundary_size: usize,
    unknowns: usize,
    nnz: usize,
    matrix_file: String,
    index_base: u8,
    mass: &'a [f64],
    interior_map: &'a [usize],
}

/// Writes the stiffness as `row col value` lines (0-based, both triangles)
/// to `path`, and a JSON sidecar with the metadata and the mass diagonal to
/// `path` with extension `json`.
pub fn export_operator(op: &DiscreteOperator, path: impl AsRef<Path>) -> Result<()> {
    use std::io::Write;
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for (r, c, v) in op.stiffness.triplets() {
        writeln!(w, "{r} {c} {v:e}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let sidecar = OperatorSidecar {
        n: op.intrinsic_dim,
        vertex_count: op.full_size,
        boundary_size: op.boundary_size(),
        unknowns: op.dim(),
        nnz: op.stiffness.nnz(),
        matrix_file: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        index_base: 0,
        mass: &op.mass,
        interior_map: &op.interior_map,
    };
    let meta_path = path.with_extension("json");
    let text = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))
}
