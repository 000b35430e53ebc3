use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

/// Accumulates a symmetric matrix from element contributions.
///
/// Only the upper triangle is stored while assembling, so the finished
/// matrix is symmetric bit-for-bit regardless of summation order.
#[derive(Debug, Clone)]
pub struct SymmetricAssembler {
    rows: Vec<BTreeMap<usize, f64>>,
}

impl SymmetricAssembler {
    pub fn new(dim: usize) -> Self {
        Self {
            rows: vec![BTreeMap::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `value` to both `a_ij` and `a_ji` (once when `i == j`).
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        *self.rows[r].entry(c).or_insert(0.0) += value;
    }

    pub fn finish(self) -> SymmetricCsr {
        let n = self.rows.len();
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (r, row) in self.rows.into_iter().enumerate() {
            for (c, v) in row {
                per_row[r].push((c, v));
                if c != r {
                    per_row[c].push((r, v));
                }
            }
        }
        SymmetricCsr::from_rows(per_row)
    }
}

/// Compressed sparse row storage of a symmetric matrix (both triangles).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCsr {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymmetricCsr {
    fn from_rows(mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
            for &(c, v) in row.iter() {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_rows(diag.iter().enumerate().map(|(i, &v)| vec![(i, v)]).collect())
    }

    /// Builds from a dense matrix, keeping nonzeros. Fails if not exactly
    /// symmetric.
    pub fn from_dense(m: &DMatrix<f64>) -> Option<Self> {
        if m.nrows() != m.ncols() {
            return None;
        }
        let n = m.nrows();
        let mut rows = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] != m[(j, i)] {
                    return None;
                }
                if m[(i, j)] != 0.0 {
                    rows[i].push((j, m[(i, j)]));
                }
            }
        }
        Some(Self::from_rows(rows))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| crate::sum::compensated_sum(self.row(i).map(|(_, v)| v)))
            .collect()
    }

    /// `max |a_ij − a_ji|` over stored entries.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `A·X` for a column-major block, columns processed in parallel.
    pub fn mul_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.dim);
        let mut out = DMatrix::zeros(self.dim, x.ncols());
        if self.dim == 0 {
            return out;
        }
        out.as_mut_slice()
            .par_chunks_mut(self.dim)
            .zip(x.as_slice().par_chunks(self.dim))
            .for_each(|(y, xc)| self.mul_vec(xc, y));
        out
    }

    /// `A + diag(d)`.
    pub fn add_diagonal(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.dim);
        let rows = (0..self.dim)
            .map(|i| {
                let mut row: Vec<(usize, f64)> = self.row(i).collect();
                match row.binary_search_by_key(&i, |&(c, _)| c) {
                    Ok(pos) => row[pos].1 += d[i],
                    Err(pos) => row.insert(pos, (i, d[i])),
                }
                row
            })
            .collect();
        Self::from_rows(rows)
    }

    /// `D·A·D` for a diagonal scaling `D`.
    pub fn scale_symmetric(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.dim);
        let rows = (0..self.dim)
            .map(|i| self.row(i).map(|(j, v)| (j, d[i] * v * d[j])).collect())
            .collect();
        Self::from_rows(rows)
    }

    /// Principal submatrix on `keep` (indices in increasing order).
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        let mut new_index = vec![usize::MAX; self.dim];
        for (new, &old) in keep.iter().enumerate() {
            new_index[old] = new;
        }
        let rows = keep
            .iter()
            .map(|&old| {
                self.row(old)
                    .filter(|&(j, _)| new_index[j] != usize::MAX)
                    .map(|(j, v)| (new_index[j], v))
                    .collect()
            })
            .collect();
        Self::from_rows(rows)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `(row, col, value)` for every stored entry.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }
}
