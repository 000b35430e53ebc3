//! Finite-difference Kohn sublaplacian on boxes in the Heisenberg group
//! `H^n ≅ R^{2n+1}` with coordinates `(x_1..x_n, y_1..y_n, t)`.
//!
//! The operator is assembled as `Σ_F A_Fᵀ W A_F` over the horizontal fields
//! `X_i = ∂x_i + (y_i/2)∂t` and `Y_i = ∂y_i − (x_i/2)∂t`, each discretized by
//! forward differences with zero extension outside the box.

use serde::{Deserialize, Serialize};

use super::DiscreteOperator;
use crate::linalg::SymmetricAssembler;
use crate::{Error, Result};

/// Uniform grid on the box `Π [−L_a/2, L_a/2]`, with `res` interior nodes per
/// axis; boundary nodes carry the Dirichlet condition and are not unknowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergGrid {
    n: u32,
    /// Side lengths for the `x`, `y` and `t` axes.
    sides: [f64; 3],
    res: usize,
}

/// `∂_axis + factor·coord_axis·∂_t`, the shape shared by `X_i` and `Y_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FirstOrderField {
    pub axis: usize,
    pub t_coef: Option<(usize, f64)>,
}

impl HeisenbergGrid {
    pub fn new(n: u32, sides: [f64; 3], res: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("Heisenberg parameter n must be at least 1"));
        }
        if sides.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::invalid("box side lengths must be positive"));
        }
        if res < 2 {
            return Err(Error::invalid("need at least 2 interior points per axis"));
        }
        let unknowns = (res as f64).powi(2 * n as i32 + 1);
        if unknowns > 5e7 {
            return Err(Error::invalid(format!("grid with {unknowns:.0} unknowns is too large")));
        }
        Ok(Self { n, sides, res })
    }

    /// The cube `[−side/2, side/2]^{2n+1}`.
    pub fn cube(n: u32, side: f64, res: usize) -> Result<Self> {
        Self::new(n, [side; 3], res)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn res(&self) -> usize {
        self.res
    }

    pub fn axes(&self) -> usize {
        2 * self.n as usize + 1
    }

    pub fn t_axis(&self) -> usize {
        2 * self.n as usize
    }

    pub fn side(&self, axis: usize) -> f64 {
        let n = self.n as usize;
        if axis < n {
            self.sides[0]
        } else if axis < 2 * n {
            self.sides[1]
        } else {
            self.sides[2]
        }
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.side(axis) / (self.res + 1) as f64
    }

    pub fn unknowns(&self) -> usize {
        self.res.pow(self.axes() as u32)
    }

    /// Coordinate of node index `j ∈ 0..=res+1` along `axis`.
    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        -0.5 * self.side(axis) + j as f64 * self.spacing(axis)
    }

    /// Unknown number of the interior node with indices `idx` (each in
    /// `1..=res`), lexicographic with axis 0 fastest.
    pub fn index_of(&self, idx: &[usize]) -> Option<usize> {
        let mut out = 0;
        for &j in idx.iter().rev() {
            if j == 0 || j > self.res {
                return None;
            }
            out = out * self.res + (j - 1);
        }
        Some(out)
    }

    /// Node indices of unknown `u`.
    pub fn node_of(&self, mut u: usize) -> Vec<usize> {
        (0..self.axes())
            .map(|_| {
                let j = u % self.res + 1;
                u /= self.res;
                j
            })
            .collect()
    }

    pub(crate) fn horizontal_fields(&self) -> Vec<FirstOrderField> {
        let n = self.n as usize;
        let mut fields = Vec::with_capacity(2 * n);
        for i in 0..n {
            fields.push(FirstOrderField {
                axis: i,
                t_coef: Some((n + i, 0.5)),
            });
            fields.push(FirstOrderField {
                axis: n + i,
                t_coef: Some((i, -0.5)),
            });
        }
        fields
    }
}

/// The Dirichlet sublaplacian `−Σ (X_i² + Y_i²)` on the grid.
pub fn assemble_heisenberg(grid: &HeisenbergGrid) -> Result<DiscreteOperator> {
    assemble_fields(grid, &grid.horizontal_fields())
}

/// `Σ_F A_Fᵀ W A_F` with `W = Π h_a` the cell volume, and `M = W·I`.
pub(crate) fn assemble_fields(grid: &HeisenbergGrid, fields: &[FirstOrderField]) -> Result<DiscreteOperator> {
    let axes = grid.axes();
    let t = grid.t_axis();
    let weight: f64 = (0..axes).map(|a| grid.spacing(a)).product();
    let dim = grid.unknowns();
    let mut asm = SymmetricAssembler::new(dim);

    // Rows run over nodes with every index in 0..=res, so that each forward
    // difference `f(p + e) − f(p)` touching an interior value is present.
    let side = grid.res + 1;
    let rows = side.pow(axes as u32);
    let mut node = vec![0usize; axes];
    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(4);
    for r in 0..rows {
        let mut rem = r;
        for slot in node.iter_mut() {
            *slot = rem % side;
            rem /= side;
        }
        for field in fields {
            entries.clear();
            let h = grid.spacing(field.axis);
            push_difference(grid, &node, field.axis, 1.0 / h, &mut entries);
            if let Some((coord_axis, factor)) = field.t_coef {
                let c = factor * grid.coordinate(coord_axis, node[coord_axis]);
                if c != 0.0 {
                    push_difference(grid, &node, t, c / grid.spacing(t), &mut entries);
                }
            }
            for a in 0..entries.len() {
                for b in a..entries.len() {
                    let (ia, va) = entries[a];
                    let (ib, vb) = entries[b];
                    asm.add(ia, ib, weight * va * vb);
                }
            }
        }
    }
    let stiffness = asm.finish();
    Ok(DiscreteOperator {
        stiffness,
        mass: vec![weight; dim],
        potential: vec![0.0; dim],
        interior_map: (0..dim).collect(),
        full_size: dim,
        intrinsic_dim: axes as u32,
    })
}

/// Appends the interior entries of `scale·(f(p + e_axis) − f(p))`.
fn push_difference(grid: &HeisenbergGrid, node: &[usize], axis: usize, scale: f64, out: &mut Vec<(usize, f64)>) {
    let mut ahead = node.to_vec();
    ahead[axis] += 1;
    for (idx, sign) in [(ahead.as_slice(), 1.0), (node, -1.0)] {
        if let Some(u) = grid.index_of(idx) {
            match out.iter_mut().find(|(i, _)| *i == u) {
                Some(entry) => entry.1 += sign * scale,
                None => out.push((u, sign * scale)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{solve_smallest, SolverOptions};
    use std::f64::consts::PI;

    #[test]
    fn indexing_round_trip() {
        let g = HeisenbergGrid::cube(1, 2.0, 5).unwrap();
        for u in 0..g.unknowns() {
            assert_eq!(g.index_of(&g.node_of(u)), Some(u));
        }
        assert_eq!(g.index_of(&[0, 1, 1]), None);
        assert!((g.coordinate(0, 3) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(HeisenbergGrid::cube(0, 2.0, 8).is_err());
        assert!(HeisenbergGrid::cube(1, 2.0, 1).is_err());
        assert!(HeisenbergGrid::cube(1, -1.0, 8).is_err());
    }

    #[test]
    fn exact_symmetry_and_positivity() {
        let g = HeisenbergGrid::cube(1, 2.0, 6).unwrap();
        let op = assemble_heisenberg(&g).unwrap();
        assert_eq!(op.stiffness.symmetry_residual(), 0.0);
        let sol = solve_smallest(&op, 3, &SolverOptions::default()).unwrap();
        assert!(sol.eigenvalues[0] > 0.0);
    }

    #[test]
    fn euclidean_fields_give_box_laplacian() {
        let g = HeisenbergGrid::cube(1, 2.0, 32).unwrap();
        let fields: Vec<FirstOrderField> = (0..3).map(|axis| FirstOrderField { axis, t_coef: None }).collect();
        let op = assemble_fields(&g, &fields).unwrap();
        let sol = solve_smallest(&op, 4, &SolverOptions::default()).unwrap();
        let q = PI * PI / 4.0;
        for (j, exact) in [3.0 * q, 6.0 * q, 6.0 * q, 6.0 * q].iter().enumerate() {
            assert!((sol.eigenvalues[j] - exact).abs() < 0.03 * exact, "{j}: {}", sol.eigenvalues[j]);
        }
    }

    /// On functions constant in `t` the `∂t` parts drop out away from the
    /// `t` faces, leaving the planar five-point Laplacian in `(x, y)`.
    #[test]
    fn t_constant_functions_see_planar_laplacian() {
        let res = 7;
        let g = HeisenbergGrid::cube(1, 2.0, res).unwrap();
        let op = assemble_heisenberg(&g).unwrap();
        let f = |x: usize, y: usize| ((x * 7 + y * 3) % 5) as f64 - 1.7;
        let mut v = vec![0.0; g.unknowns()];
        for (u, val) in v.iter_mut().enumerate() {
            let p = g.node_of(u);
            *val = f(p[0], p[1]);
        }
        let mut kv = vec![0.0; v.len()];
        op.stiffness.mul_vec(&v, &mut kv);
        let (hx, hy) = (g.spacing(0), g.spacing(1));
        let w = hx * hy * g.spacing(2);
        let val = |x: usize, y: usize| if (1..=res).contains(&x) && (1..=res).contains(&y) { f(x, y) } else { 0.0 };
        for u in 0..v.len() {
            let p = g.node_of(u);
            if !(2..res).contains(&p[2]) {
                continue;
            }
            let (x, y) = (p[0], p[1]);
            let lap = (2.0 * val(x, y) - val(x + 1, y) - val(x - 1, y)) / (hx * hx)
                + (2.0 * val(x, y) - val(x, y + 1) - val(x, y - 1)) / (hy * hy);
            assert!((kv[u] / w - lap).abs() < 1e-9 * lap.abs().max(1.0), "node {p:?}");
        }
    }
}
