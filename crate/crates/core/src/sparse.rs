//! Compressed sparse column storage.
//!
//! Every solver in the crate works on [`SparseMatrix`]. Columns are the natural
//! unit for the nonnegative algorithm: it needs the column sums `a_{·j}` and the
//! transpose product `Ãᵀc`, and both stay `O(𝒩_A)` in CSC without keeping a
//! second copy of the matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flops::Flops;
use crate::math::abs;
use crate::vector::{check_len, DenseVector};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
    col_sums: Vec<f64>,
}

/// Row-major mirror of a [`SparseMatrix`], built once for row sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct RowMajor {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl RowMajor {
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Duplicates are summed and entries whose sum is exactly zero are dropped,
    /// so [`nnz`](Self::nnz) counts genuine nonzeros only.
    pub fn from_triplets(nrows: usize, ncols: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        for (k, &(row, col, value)) in entries.iter().enumerate() {
            if row >= nrows || col >= ncols {
                return Err(Error::IndexOutOfRange { row, col, nrows, ncols });
            }
            if !value.is_finite() {
                return Err(Error::NonFiniteValue(k));
            }
        }

        let mut sorted: Vec<(usize, usize, f64)> = entries.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (j, i));

        let mut col_ptr = vec![0usize; ncols + 1];
        let mut row_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut cols = Vec::with_capacity(sorted.len());

        let mut k = 0;
        while k < sorted.len() {
            let (row, col, mut sum) = sorted[k];
            k += 1;
            while k < sorted.len() && sorted[k].0 == row && sorted[k].1 == col {
                sum += sorted[k].2;
                k += 1;
            }
            if sum != 0.0 {
                row_idx.push(row);
                values.push(sum);
                cols.push(col);
            }
        }
        for &c in &cols {
            col_ptr[c + 1] += 1;
        }
        for j in 0..ncols {
            col_ptr[j + 1] += col_ptr[j];
        }

        Ok(Self::from_parts(nrows, ncols, col_ptr, row_idx, values))
    }

    fn from_parts(nrows: usize, ncols: usize, col_ptr: Vec<usize>, row_idx: Vec<usize>, values: Vec<f64>) -> Self {
        let col_sums = (0..ncols)
            .map(|j| values[col_ptr[j]..col_ptr[j + 1]].iter().sum())
            .collect();
        Self {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
            col_sums,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_parts(n, n, (0..=n).collect(), (0..n).collect(), vec![1.0; n])
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Number of stored (nonzero) entries, `𝒩_A`.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Stored `(row, value)` pairs of column `j`, rows increasing.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All stored entries in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols).flat_map(move |j| self.column(j).map(move |(i, v)| (i, j, v)))
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let span = self.col_ptr[col]..self.col_ptr[col + 1];
        match self.row_idx[span.clone()].binary_search(&row) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// Cached column sums `a_{·j}`.
    pub fn column_sums(&self) -> &[f64] {
        &self.col_sums
    }

    /// `A·1`.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows];
        for (i, _, v) in self.entries() {
            out[i] += v;
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|j| self.get(j, j)).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// `A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<DenseVector> {
        check_len(x, self.ncols)?;
        let mut out = vec![0.0; self.nrows];
        self.spmv_into(x, &mut out, &mut ());
        DenseVector::new(out)
    }

    /// `Aᵀ c`, without materialising the transpose.
    pub fn spmv_transpose(&self, c: &[f64]) -> Result<DenseVector> {
        check_len(c, self.nrows)?;
        let mut out = vec![0.0; self.ncols];
        self.spmv_transpose_into(c, &mut out, &mut ());
        DenseVector::new(out)
    }

    #[inline]
    fn column_slices(&self, j: usize) -> (&[usize], &[f64]) {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[r.clone()], &self.values[r])
    }

    /// Scatter-add `out = A x`; one multiply and one add per stored entry.
    pub(crate) fn spmv_into<F: Flops>(&self, x: &[f64], out: &mut [f64], flops: &mut F) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(out.len(), self.nrows);
        out.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.ncols {
            let xj = x[j];
            let (rows, vals) = self.column_slices(j);
            for (&i, &v) in rows.iter().zip(vals) {
                out[i] += v * xj;
            }
        }
        flops.add(2 * self.nnz() as u64);
    }

    /// Gather `out = Aᵀ c`; one multiply and one add per stored entry.
    pub(crate) fn spmv_transpose_into<F: Flops>(&self, c: &[f64], out: &mut [f64], flops: &mut F) {
        debug_assert_eq!(c.len(), self.nrows);
        debug_assert_eq!(out.len(), self.ncols);
        for (j, o) in out.iter_mut().enumerate() {
            let (rows, vals) = self.column_slices(j);
            *o = rows.iter().zip(vals).map(|(&i, &v)| v * c[i]).sum();
        }
        flops.add(2 * self.nnz() as u64);
    }

    pub fn transpose(&self) -> SparseMatrix {
        let rm = self.to_row_major();
        Self::from_parts(self.ncols, self.nrows, rm.row_ptr, rm.col_idx, rm.values)
    }

    /// Builds the CSR mirror (costs `𝒩_A` extra storage).
    pub fn to_row_major(&self) -> RowMajor {
        let mut row_ptr = vec![0usize; self.nrows + 1];
        for &i in &self.row_idx {
            row_ptr[i + 1] += 1;
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut next = row_ptr.clone();
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (i, j, v) in self.entries() {
            let slot = next[i];
            col_idx[slot] = j;
            values[slot] = v;
            next[i] += 1;
        }
        RowMajor {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Structural and value symmetry, `|a_ij − a_ji| ≤ rel_tol · max|a|`.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.values.iter().fold(0.0f64, |m, &v| m.max(abs(v)));
        let t = self.transpose();
        if t.col_ptr != self.col_ptr || t.row_idx != self.row_idx {
            // Pattern differs; still symmetric if the mismatched entries are tiny.
            return self
                .entries()
                .chain(t.entries())
                .all(|(i, j, _)| abs(self.get(i, j) - self.get(j, i)) <= rel_tol * scale);
        }
        self.values
            .iter()
            .zip(&t.values)
            .all(|(a, b)| abs(a - b) <= rel_tol * scale)
    }

    /// `(A + Aᵀ)/2`.
    pub fn symmetric_part(&self) -> Result<SparseMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        let triplets: Vec<_> = self
            .entries()
            .flat_map(|(i, j, v)| [(i, j, 0.5 * v), (j, i, 0.5 * v)])
            .collect();
        Self::from_triplets(self.nrows, self.ncols, &triplets)
    }

    /// Returns `A diag(scale)⁻¹`, i.e. every column divided by its factor.
    pub(crate) fn divide_columns(&self, scale: &[f64]) -> SparseMatrix {
        let mut values = self.values.clone();
        for j in 0..self.ncols {
            for v in &mut values[self.col_ptr[j]..self.col_ptr[j + 1]] {
                *v /= scale[j];
            }
        }
        Self::from_parts(
            self.nrows,
            self.ncols,
            self.col_ptr.clone(),
            self.row_idx.clone(),
            values,
        )
    }
}
