//! Compressed sparse matrices used by the factorizations and the engine.
//!
//! Matrices are assembled from triplets and then compressed row-major
//! ([`CsrMatrix`]) or column-major ([`CscMatrix`]). Explicit zeros are
//! dropped on compression, so `nnz` is always a true nonzero count.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct Triplets {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Triplets {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Duplicates are summed; entries that cancel to zero are removed.
    pub fn to_csr(mut self) -> CsrMatrix {
        self.entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut data: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(self.entries.len());
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
                rows.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_indices = Vec::with_capacity(indices.len());
        let mut keep_data = Vec::with_capacity(data.len());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(data) {
            if v != 0.0 {
                indptr[r + 1] += 1;
                keep_indices.push(c);
                keep_data.push(v);
            }
        }
        for i in 0..self.nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr,
            indices: keep_indices,
            data: keep_data,
        }
    }

    pub fn to_csc(self) -> CscMatrix {
        let Triplets {
            nrows,
            ncols,
            entries,
        } = self;
        let t = Triplets {
            nrows: ncols,
            ncols: nrows,
            entries: entries.into_iter().map(|(r, c, v)| (c, r, v)).collect(),
        };
        CscMatrix { t: t.to_csr() }
    }
}

/// Row-major compressed matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Triplets::new(nrows, ncols).to_csr()
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Triplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 1.0);
        }
        t.to_csr()
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut t = Triplets::new(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                t.push(i, j, m[(i, j)]);
            }
        }
        t.to_csr()
    }

    /// Diagonal matrix from a vector.
    pub fn diag(d: &[f64]) -> Self {
        let mut t = Triplets::new(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            t.push(i, i, v);
        }
        t.to_csr()
    }

    /// Column vector as an `n x 1` matrix.
    pub fn column(v: &[f64]) -> Self {
        let mut t = Triplets::new(v.len(), 1);
        for (i, &x) in v.iter().enumerate() {
            t.push(i, 0, x);
        }
        t.to_csr()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b]
            .iter()
            .copied()
            .zip(self.data[a..b].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[a..b].binary_search(&j) {
            Ok(k) => self.data[a + k],
            Err(_) => 0.0,
        }
    }

    /// All stored entries as `(row, col, value)`, row-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn to_triplets(&self) -> Triplets {
        let mut t = Triplets::new(self.nrows, self.ncols);
        t.entries.extend(self.iter());
        t
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = Triplets::new(self.ncols, self.nrows);
        t.entries.extend(self.iter().map(|(i, j, v)| (j, i, v)));
        t.to_csr()
    }

    pub fn to_csc(&self) -> CscMatrix {
        CscMatrix {
            t: self.transpose(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn scale(&self, alpha: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= alpha);
        out.to_triplets().to_csr()
    }

    /// `diag(left) * self * diag(right)`.
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> CsrMatrix {
        let mut t = Triplets::new(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            t.push(i, j, left[i] * v * right[j]);
        }
        t.to_csr()
    }

    /// Sparse Kronecker product `self (x) other`.
    pub fn kron(&self, other: &CsrMatrix) -> CsrMatrix {
        let mut t = Triplets::new(self.nrows * other.nrows, self.ncols * other.ncols);
        t.entries.reserve(self.nnz() * other.nnz());
        for (i, j, a) in self.iter() {
            for (k, l, b) in other.iter() {
                t.push(i * other.nrows + k, j * other.ncols + l, a * b);
            }
        }
        t.to_csr()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.nrows != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.nrows, other.nrows
            )));
        }
        let mut t = Triplets::new(self.nrows, self.ncols + other.ncols);
        t.entries.extend(self.iter());
        t.entries
            .extend(other.iter().map(|(i, j, v)| (i, j + self.ncols, v)));
        Ok(t.to_csr())
    }

    pub fn add(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let mut t = self.to_triplets();
        t.entries.extend(other.iter());
        Ok(t.to_csr())
    }

    fn check_mul(&self, x: &[f64], out: &[f64]) -> Result<()> {
        if x.len() != self.ncols || out.len() != self.nrows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of {} into {}",
                self.nrows,
                self.ncols,
                x.len(),
                out.len()
            )));
        }
        Ok(())
    }

    /// `out += self * x`.
    pub fn mul_vec_add(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_mul(x, out)?;
        for (i, o) in out.iter_mut().enumerate() {
            *o += self.row_dot(i, x);
        }
        Ok(())
    }

    /// `out += self * x`, rows split across the rayon pool. Each row is
    /// summed in storage order, so the result does not depend on scheduling.
    pub fn par_mul_vec_add(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_mul(x, out)?;
        out.par_iter_mut()
            .with_min_len(256)
            .enumerate()
            .for_each(|(i, o)| *o += self.row_dot(i, x));
        Ok(())
    }

    #[inline]
    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b]
            .iter()
            .zip(&self.data[a..b])
            .map(|(&j, &v)| v * x[j])
            .sum()
    }

    /// `out += self^T * y`.
    pub fn tr_mul_vec_add(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        if y.len() != self.nrows || out.len() != self.ncols {
            return Err(Error::DimensionMismatch(format!(
                "transpose of {}x{} matrix times vector of {} into {}",
                self.nrows,
                self.ncols,
                y.len(),
                out.len()
            )));
        }
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            let (a, b) = (self.indptr[i], self.indptr[i + 1]);
            for (&j, &v) in self.indices[a..b].iter().zip(&self.data[a..b]) {
                out[j] += v * yi;
            }
        }
        Ok(())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.nrows];
        self.mul_vec_add(x, &mut out)?;
        Ok(out)
    }
}

/// Column-major compressed matrix, stored as the CSR form of its transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct CscMatrix {
    t: CsrMatrix,
}

impl CscMatrix {
    pub fn nrows(&self) -> usize {
        self.t.ncols
    }

    pub fn ncols(&self) -> usize {
        self.t.nrows
    }

    pub fn nnz(&self) -> usize {
        self.t.nnz()
    }

    /// Entries `(row, value)` of column `j`, sorted by row.
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.t.row(j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.t.get(j, i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.t.iter().map(|(j, i, v)| (i, j, v))
    }

    pub fn to_csr(&self) -> CsrMatrix {
        self.t.transpose()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.t.to_dense().transpose()
    }

    /// `out += self^T * x`, one dot product per column.
    pub fn tr_mul_vec_add(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.t.mul_vec_add(x, out)
    }

    /// Parallel `out += self^T * x`; deterministic like `CsrMatrix::par_mul_vec_add`.
    pub fn par_tr_mul_vec_add(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.t.par_mul_vec_add(x, out)
    }

    /// `out += self * y`, scattered column by column.
    pub fn mul_vec_add(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        self.t.tr_mul_vec_add(y, out)
    }
}
