//! Immersed triangle meshes: validation and built-in generators.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Triangles smaller than this fraction of the squared bounding-box
/// diagonal are rejected.
pub const DEGENERATE_AREA_RATIO: f64 = 1e-12;

/// A triangulated surface together with its immersion `X` into `R^m`.
///
/// Coordinates are stored per *coordinate vertex*. Periodic meshes (flat tori)
/// carry several coordinate copies of the same surface point; `dof_of` maps
/// each copy to the degree of freedom it is merged into before assembly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh {
    ambient_dim: usize,
    coords: Vec<f64>,
    triangles: Vec<[usize; 3]>,
    dof_of: Vec<usize>,
    num_dofs: usize,
    boundary: Vec<usize>,
    euler_characteristic: i64,
}

impl TriangleMesh {
    /// Validates and builds a mesh without periodic identifications.
    pub fn new(ambient_dim: usize, coords: Vec<f64>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let count = coords.len() / ambient_dim.max(1);
        Self::with_identification(ambient_dim, coords, triangles, (0..count).collect())
    }

    /// Validates and builds a mesh whose coordinate vertex `v` is merged into
    /// degree of freedom `dof_of[v]`. Representatives must be numbered
    /// `0..num_dofs` without gaps.
    pub fn with_identification(
        ambient_dim: usize,
        coords: Vec<f64>,
        triangles: Vec<[usize; 3]>,
        dof_of: Vec<usize>,
    ) -> Result<Self> {
        if ambient_dim < 2 {
            return Err(Error::invalid("ambient dimension must be at least 2"));
        }
        if !coords.len().is_multiple_of(ambient_dim) {
            return Err(Error::invalid("coordinate array length is not a multiple of the ambient dimension"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("vertex coordinates must be finite"));
        }
        let count = coords.len() / ambient_dim;
        if dof_of.len() != count {
            return Err(Error::LengthMismatch {
                what: "vertex identification",
                expected: count,
                actual: dof_of.len(),
            });
        }
        if triangles.is_empty() {
            return Err(Error::invalid("mesh has no triangles"));
        }
        let num_dofs = dof_of.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; num_dofs];
        for &d in &dof_of {
            used[d] = true;
        }
        if used.iter().any(|u| !u) {
            return Err(Error::invalid("vertex identification leaves gaps in the numbering"));
        }

        let mut mesh = Self {
            ambient_dim,
            coords,
            triangles,
            dof_of,
            num_dofs,
            boundary: Vec::new(),
            euler_characteristic: 0,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&mut self) -> Result<()> {
        let count = self.vertex_count();
        let scale = self.bbox_diagonal();
        let threshold = DEGENERATE_AREA_RATIO * scale * scale;
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            if !(area > threshold) {
                return Err(Error::DegenerateTriangle { index: t, area });
            }
        }

        let mut touched = vec![false; self.num_dofs];
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= count) {
                return Err(Error::invalid(format!("triangle {t} references a missing vertex")));
            }
            let d = tri.map(|v| self.dof_of[v]);
            if d[0] == d[1] || d[1] == d[2] || d[0] == d[2] {
                return Err(Error::NonManifold(format!("triangle {t} repeats a vertex")));
            }
            for x in d {
                touched[x] = true;
            }
        }
        if let Some(v) = touched.iter().position(|t| !t) {
            return Err(Error::NonManifold(format!("vertex {v} belongs to no triangle")));
        }

        // Directed edges in dof numbering: each undirected edge must occur at
        // most once per direction (orientability), at most twice overall.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for e in 0..3 {
                let a = self.dof_of[tri[e]];
                let b = self.dof_of[tri[(e + 1) % 3]];
                if directed.insert((a, b), t).is_some() {
                    return Err(Error::NonManifold(format!(
                        "edge ({a}, {b}) is traversed twice in the same direction (non-manifold or inconsistently oriented)"
                    )));
                }
            }
        }
        let mut on_boundary = vec![false; self.num_dofs];
        let mut edges = 0usize;
        for &(a, b) in directed.keys() {
            if directed.contains_key(&(b, a)) {
                if a < b {
                    edges += 1;
                }
            } else {
                edges += 1;
                on_boundary[a] = true;
                on_boundary[b] = true;
            }
        }
        self.boundary = (0..self.num_dofs).filter(|&v| on_boundary[v]).collect();
        self.euler_characteristic =
            self.num_dofs as i64 - edges as i64 + self.triangles.len() as i64;
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Number of coordinate vertices (periodic copies counted separately).
    pub fn vertex_count(&self) -> usize {
        self.coords.len() / self.ambient_dim
    }

    /// Number of distinct surface points after periodic merging.
    pub fn num_dofs(&self) -> usize {
        self.num_dofs
    }

    pub fn vertex(&self, v: usize) -> &[f64] {
        &self.coords[v * self.ambient_dim..(v + 1) * self.ambient_dim]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn dof_of(&self, v: usize) -> usize {
        self.dof_of[v]
    }

    pub fn is_periodic(&self) -> bool {
        self.num_dofs != self.vertex_count()
    }

    /// Degrees of freedom lying on a boundary edge (empty for closed meshes).
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.euler_characteristic
    }

    /// A coordinate vertex representing each dof.
    pub fn representatives(&self) -> Vec<usize> {
        let mut rep = vec![usize::MAX; self.num_dofs];
        for v in 0..self.vertex_count() {
            let d = self.dof_of[v];
            if rep[d] == usize::MAX {
                rep[d] = v;
            }
        }
        rep
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let u = diff(self.vertex(b), self.vertex(a));
        let v = diff(self.vertex(c), self.vertex(a));
        0.5 * cross_norm(&u, &v)
    }

    pub fn total_area(&self) -> f64 {
        crate::sum::compensated_sum((0..self.triangles.len()).map(|t| self.triangle_area(t)))
    }

    fn bbox_diagonal(&self) -> f64 {
        let m = self.ambient_dim;
        let mut sq = 0.0;
        for axis in 0..m {
            let (lo, hi) = (0..self.vertex_count())
                .map(|v| self.coords[v * m + axis])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            sq += (hi - lo) * (hi - lo);
        }
        sq.sqrt()
    }
}

pub(crate) fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `|u ∧ v|`, the parallelogram area spanned by `u` and `v` in any dimension.
pub(crate) fn cross_norm(u: &[f64], v: &[f64]) -> f64 {
    let uu = dot(u, u);
    let vv = dot(v, v);
    let uv = dot(u, v);
    (uu * vv - uv * uv).max(0.0).sqrt()
}

/// Subdivided icosahedron projected onto the unit sphere in `R³`;
/// `10·4^level + 2` vertices.
pub fn icosphere(level: u32) -> Result<TriangleMesh> {
    if level > 8 {
        return Err(Error::invalid("icosphere level above 8 is not supported"));
    }
    let (coords, tris) = icosphere_raw(level);
    TriangleMesh::new(3, coords, tris)
}

fn icosphere_raw(level: u32) -> (Vec<f64>, Vec<[usize; 3]>) {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, p, 0.0],
        [1.0, p, 0.0],
        [-1.0, -p, 0.0],
        [1.0, -p, 0.0],
        [0.0, -1.0, p],
        [0.0, 1.0, p],
        [0.0, -1.0, -p],
        [0.0, 1.0, -p],
        [p, 0.0, -1.0],
        [p, 0.0, 1.0],
        [-p, 0.0, -1.0],
        [-p, 0.0, 1.0],
    ];
    let normalize = |v: [f64; 3]| {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / r, v[1] / r, v[2] / r]
    };
    for v in verts.iter_mut() {
        *v = normalize(*v);
    }
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let (x, y) = (verts[a], verts[b]);
                verts.push(normalize([x[0] + y[0], x[1] + y[1], x[2] + y[2]]));
                verts.len() - 1
            })
        };
        for [a, b, c] in tris {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    (verts.into_iter().flatten().collect(), tris)
}

/// Icosphere scaled to the ellipsoid with semi-axes `a, b, c`.
pub fn ellipsoid(a: f64, b: f64, c: f64, level: u32) -> Result<TriangleMesh> {
    if [a, b, c].iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::invalid("ellipsoid semi-axes must be positive"));
    }
    if level > 8 {
        return Err(Error::invalid("ellipsoid level above 8 is not supported"));
    }
    let (mut coords, tris) = icosphere_raw(level);
    for v in coords.chunks_mut(3) {
        v[0] *= a;
        v[1] *= b;
        v[2] *= c;
    }
    TriangleMesh::new(3, coords, tris)
}

/// Planar periodic grid on `[0, L1] × [0, L2]` with `res × res` cells, each
/// split into two triangles; opposite sides are identified.
pub fn flat_torus(l1: f64, l2: f64, res: usize) -> Result<TriangleMesh> {
    if !(l1 > 0.0 && l2 > 0.0 && l1.is_finite() && l2.is_finite()) {
        return Err(Error::invalid("torus side lengths must be positive"));
    }
    if res < 3 {
        return Err(Error::invalid("torus resolution must be at least 3"));
    }
    let side = res + 1;
    let mut coords = Vec::with_capacity(2 * side * side);
    let mut dof_of = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            coords.push(l1 * i as f64 / res as f64);
            coords.push(l2 * j as f64 / res as f64);
            dof_of.push((j % res) * res + (i % res));
        }
    }
    let idx = |i: usize, j: usize| j * side + i;
    let mut tris = Vec::with_capacity(2 * res * res);
    for j in 0..res {
        for i in 0..res {
            tris.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            tris.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriangleMesh::with_identification(2, coords, tris, dof_of)
}

/// The Clifford torus `(cos θ, sin θ, cos φ, sin φ)/√2` in `R⁴` on a
/// `res × res` grid. It is flat, with both periods equal to `√2·π`.
pub fn clifford_torus(res: usize) -> Result<TriangleMesh> {
    if res < 3 {
        return Err(Error::invalid("Clifford torus resolution must be at least 3"));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut coords = Vec::with_capacity(4 * res * res);
    for j in 0..res {
        let phi = 2.0 * PI * j as f64 / res as f64;
        for i in 0..res {
            let theta = 2.0 * PI * i as f64 / res as f64;
            coords.extend([s * theta.cos(), s * theta.sin(), s * phi.cos(), s * phi.sin()]);
        }
    }
    let idx = |i: usize, j: usize| (j % res) * res + (i % res);
    let mut tris = Vec::with_capacity(2 * res * res);
    for j in 0..res {
        for i in 0..res {
            tris.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            tris.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriangleMesh::new(4, coords, tris)
}

/// Concentric-ring triangulation of the unit disc: ring `j` (of `rings`)
/// has `6j` vertices at radius `j/rings`. Returns `(radius, angle)` per
/// vertex and the triangles.
fn ring_disc(rings: usize) -> (Vec<(f64, f64)>, Vec<[usize; 3]>) {
    let mut polar = vec![(0.0, 0.0)];
    let mut tris = Vec::new();
    let mut inner: Vec<usize> = vec![0];
    for j in 1..=rings {
        let count = 6 * j;
        let start = polar.len();
        for i in 0..count {
            polar.push((j as f64 / rings as f64, 2.0 * PI * i as f64 / count as f64));
        }
        let outer: Vec<usize> = (start..start + count).collect();
        if j == 1 {
            for i in 0..count {
                tris.push([0, outer[i], outer[(i + 1) % count]]);
            }
        } else {
            zip_rings(&inner, &outer, &mut tris);
        }
        inner = outer;
    }
    (polar, tris)
}

/// Triangulates the annulus between two rings whose vertices are evenly
/// spaced in angle starting at angle 0, orienting triangles counterclockwise.
fn zip_rings(inner: &[usize], outer: &[usize], tris: &mut Vec<[usize; 3]>) {
    let (m, p) = (inner.len(), outer.len());
    let (mut i, mut j) = (0, 0);
    while i < m || j < p {
        // Angles (as fractions of a turn) of the next vertex on each ring.
        let next_inner = (i + 1) as f64 / m as f64;
        let next_outer = (j + 1) as f64 / p as f64;
        if j < p && (i == m || next_outer <= next_inner) {
            tris.push([inner[i % m], outer[j], outer[(j + 1) % p]]);
            j += 1;
        } else {
            tris.push([inner[i % m], outer[j % p], inner[(i + 1) % m]]);
            i += 1;
        }
    }
}

/// Planar disc of the given radius in `R²`.
pub fn disc(radius: f64, rings: usize) -> Result<TriangleMesh> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("disc radius must be positive"));
    }
    if rings < 2 {
        return Err(Error::invalid("disc needs at least 2 rings"));
    }
    let (polar, tris) = ring_disc(rings);
    let coords = polar
        .iter()
        .flat_map(|&(r, a)| [radius * r * a.cos(), radius * r * a.sin()])
        .collect();
    TriangleMesh::new(2, coords, tris)
}

/// Geodesic disc of angular radius `angle` around the north pole of the unit
/// sphere, with `2^(level+1)` rings.
pub fn spherical_cap(angle: f64, level: u32) -> Result<TriangleMesh> {
    if !(angle > 0.0 && angle < PI) {
        return Err(Error::invalid("cap angle must lie in (0, π)"));
    }
    if level > 7 {
        return Err(Error::invalid("cap level above 7 is not supported"));
    }
    let (polar, tris) = ring_disc(1 << (level + 1));
    let coords = polar
        .iter()
        .flat_map(|&(r, a)| {
            let theta = angle * r;
            [theta.sin() * a.cos(), theta.sin() * a.sin(), theta.cos()]
        })
        .collect();
    TriangleMesh::new(3, coords, tris)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        for level in 0..4u32 {
            let m = icosphere(level).unwrap();
            assert_eq!(m.vertex_count(), 10 * 4usize.pow(level) + 2);
            assert!(m.is_closed());
            assert_eq!(m.euler_characteristic(), 2);
        }
        let area = icosphere(4).unwrap().total_area();
        assert!((area - 4.0 * PI).abs() < 0.01 * 4.0 * PI);
    }

    #[test]
    fn torus_topology() {
        let t = flat_torus(1.0, 2.0, 8).unwrap();
        assert_eq!(t.num_dofs(), 64);
        assert!(t.is_closed());
        assert_eq!(t.euler_characteristic(), 0);
        assert!((t.total_area() - 2.0).abs() < 1e-12);
        let c = clifford_torus(12).unwrap();
        assert!(c.is_closed());
        assert_eq!(c.euler_characteristic(), 0);
        assert_eq!(c.ambient_dim(), 4);
    }

    #[test]
    fn disc_and_cap() {
        let d = disc(1.0, 6).unwrap();
        assert_eq!(d.euler_characteristic(), 1);
        assert_eq!(d.boundary().len(), 36);
        let cap = spherical_cap(PI / 2.0, 2).unwrap();
        assert!(!cap.boundary().is_empty());
        assert_eq!(cap.euler_characteristic(), 1);
        assert!((cap.total_area() - 2.0 * PI).abs() < 0.02 * 2.0 * PI);
    }

    #[test]
    fn rejects_bad_meshes() {
        let coords = vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 0.0];
        // Collinear triangle.
        assert!(matches!(
            TriangleMesh::new(3, coords.clone(), vec![[0, 1, 3]]),
            Err(Error::DegenerateTriangle { index: 0, .. })
        ));
        // Isolated vertex 3.
        assert!(matches!(
            TriangleMesh::new(3, coords.clone(), vec![[0, 1, 2]]),
            Err(Error::NonManifold(_))
        ));
        // Three triangles on one edge.
        let fan = vec![
            0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0,
        ];
        assert!(matches!(
            TriangleMesh::new(3, fan, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]),
            Err(Error::NonManifold(_))
        ));
    }
}
