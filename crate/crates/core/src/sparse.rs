//! Coordinate-format accumulation and compressed storage of stiffness matrices.
//!
//! Every scalar basis function carries three displacement components, so block
//! `(i, j)` of a matrix occupies rows `3i..3i+3` and columns `3j..3j+3`.

use std::io::Write;

use crate::error::{Error, Result};

pub type Block3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
struct Triplet {
    row: u32,
    col: u32,
    value: f64,
}

/// Unsorted `(row, col, value)` triplets; duplicates are summed on [`finalize`](Self::finalize).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrixBuilder {
    dim: usize,
    triplets: Vec<Triplet>,
}

impl SparseMatrixBuilder {
    /// Builder for a `3 n_functions x 3 n_functions` matrix.
    pub fn new(n_functions: usize) -> Self {
        Self::with_dim(3 * n_functions)
    }

    pub fn with_dim(dim: usize) -> Self {
        assert!(dim <= u32::MAX as usize, "matrix dimension exceeds 32-bit indices");
        Self { dim, triplets: Vec::new() }
    }

    pub fn reserve(&mut self, additional: usize) {
        self.triplets.reserve(additional);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) -> Result<()> {
        for index in [row, col] {
            if index >= self.dim {
                return Err(Error::IndexOutOfRange { index, dim: self.dim });
            }
        }
        self.triplets.push(Triplet { row: row as u32, col: col as u32, value });
        Ok(())
    }

    /// Appends the nine entries of the 3x3 block coupling functions `i` and `j`.
    pub fn add_block(&mut self, i: usize, j: usize, blk: &Block3) -> Result<()> {
        let n = self.dim / 3;
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, dim: n });
            }
        }
        let (r0, c0) = (3 * i as u32, 3 * j as u32);
        for (a, row) in blk.iter().enumerate() {
            for (c, &value) in row.iter().enumerate() {
                self.triplets.push(Triplet { row: r0 + a as u32, col: c0 + c as u32, value });
            }
        }
        Ok(())
    }

    /// Moves all triplets of `other` to the end of `self`.
    pub fn append(&mut self, other: &mut SparseMatrixBuilder) -> Result<()> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        self.triplets.append(&mut other.triplets);
        Ok(())
    }

    /// Sorts by `(row, col)` (stably, so the summation order only depends on
    /// insertion order) and sums duplicates.
    pub fn finalize(mut self) -> Result<StiffnessMatrix> {
        if self.triplets.is_empty() {
            return Err(Error::EmptyBuilder);
        }
        self.triplets.sort_by_key(|t| ((t.row as u64) << 32) | t.col as u64);
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut col_idx: Vec<usize> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for t in &self.triplets {
            if last == Some((t.row, t.col)) {
                *values.last_mut().expect("entry exists") += t.value;
            } else {
                col_idx.push(t.col as usize);
                values.push(t.value);
                row_ptr[t.row as usize + 1] += 1;
                last = Some((t.row, t.col));
            }
        }
        for r in 0..self.dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(StiffnessMatrix { dim: self.dim, row_ptr, col_idx, values })
    }
}

/// Square matrix in compressed sparse row storage, columns sorted within rows.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl StiffnessMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |k| vals[k])
    }

    /// 3x3 block coupling functions `i` and `j`.
    pub fn block(&self, i: usize, j: usize) -> Block3 {
        let mut out = [[0.0; 3]; 3];
        for (a, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.get(3 * i + a, 3 * j + c);
            }
        }
        out
    }

    /// Stored entries as `(row, col, value)`, row-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(x.len(), self.dim));
        }
        Ok((0..self.dim)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect())
    }

    /// `v^T K u`.
    pub fn bilinear(&self, v: &[f64], u: &[f64]) -> Result<f64> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(v.len(), self.dim));
        }
        Ok(self.mul_vec(u)?.iter().zip(v).map(|(a, b)| a * b).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `||K - K^T||_F / ||K||_F`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut acc = 0.0;
        for (r, c, v) in self.iter() {
            let d = v - self.get(c, r);
            acc += d * d;
        }
        // Entries present only in the transpose are caught from the other side.
        acc.sqrt() / self.frobenius_norm()
    }

    /// Dense row-major copy; meant for small matrices in tests and tools.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.dim]; self.dim];
        for (r, c, v) in self.iter() {
            out[r][c] = v;
        }
        out
    }

    /// Rebuilds a builder holding exactly the stored entries.
    pub fn to_builder(&self) -> SparseMatrixBuilder {
        let mut b = SparseMatrixBuilder::with_dim(self.dim);
        b.reserve(self.nnz());
        for (r, c, v) in self.iter() {
            b.triplets.push(Triplet { row: r as u32, col: c as u32, value: v });
        }
        b
    }

    /// Matrix Market `coordinate real general` output with 1-based indices.
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.dim, self.dim, self.nnz())?;
        for (r, c, v) in self.iter() {
            writeln!(out, "{} {} {:.17e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

/// `||A - B||_F / max(||A||_F, ||B||_F)`, zero when both are zero.
pub fn frobenius_rel_diff(a: &StiffnessMatrix, b: &StiffnessMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let mut acc = 0.0;
    for r in 0..a.dim {
        let (ca, va) = a.row(r);
        let (cb, vb) = b.row(r);
        let (mut i, mut j) = (0, 0);
        while i < ca.len() || j < cb.len() {
            let d = match (ca.get(i), cb.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                    va[i - 1] - vb[j - 1]
                }
                (Some(x), Some(y)) if x < y => {
                    i += 1;
                    va[i - 1]
                }
                (Some(_), None) => {
                    i += 1;
                    va[i - 1]
                }
                _ => {
                    j += 1;
                    -vb[j - 1]
                }
            };
            acc += d * d;
        }
    }
    let scale = a.frobenius_norm().max(b.frobenius_norm());
    Ok(if scale == 0.0 { 0.0 } else { acc.sqrt() / scale })
}
