//! Core value types: `DenseMatrix`, `RevealMask`, `PermPair`.
//!
//! Matrices are immutable after construction; every operation returns a new
//! value. Entries are validated finite so downstream numerics never see
//! NaN/Inf.

use crate::error::{Error, Result};
use crate::scalar::Real;
use std::ops::Index;

/// Dense row-major matrix with at least one row and one column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry {bad}")));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of equal-length rows.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidInput("matrix needs at least one row".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(m, n, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix by evaluating `f(i, j)` at every position.
    ///
    /// # Panics
    /// Panics if `f` produces a non-finite value or a dimension is zero;
    /// generator closures are internal and must be total.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_vec(rows, cols, data).expect("generator must produce a valid matrix")
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    /// Constant matrix.
    pub fn constant(rows: usize, cols: usize, value: T) -> Self {
        Self::from_fn(rows, cols, |_, _| value)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `(rows, cols)` pair.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    /// Row-major slice of all entries.
    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Applies `f` entrywise.
    pub fn map(&self, mut f: impl FnMut(T) -> T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| f(self.get(i, j)))
    }

    /// Entrywise sum.
    ///
    /// # Panics
    /// Panics on shape mismatch; callers combine matrices they built with
    /// matching shapes.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "add: shape mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    /// Entrywise difference.
    ///
    /// # Panics
    /// Panics on shape mismatch.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "sub: shape mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    /// Scalar multiple.
    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// Entrywise (Hadamard) product; errors on shape mismatch.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "hadamard: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) * other.get(i, j)
        }))
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    /// Averaged Frobenius norm: Frobenius norm divided by sqrt(m*n).
    pub fn avg_frobenius(&self) -> T {
        self.frobenius() / T::of_usize(self.rows * self.cols).sqrt()
    }

    /// Entrywise maximum absolute value.
    pub fn linf_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Mean absolute entry, i.e. the L1 norm divided by m*n.
    pub fn mean_abs(&self) -> T {
        let sum = self.data.iter().fold(T::zero(), |acc, &v| acc + v.abs());
        sum / T::of_usize(self.rows * self.cols)
    }

    /// Relabels rows and columns: `result[i][j] = self[perm.row(i)][perm.col(j)]`.
    pub fn apply_perm(&self, perm: &PermPair) -> Result<Self> {
        if perm.row_len() != self.rows || perm.col_len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "permutation sized {}x{} applied to {}x{} matrix",
                perm.row_len(),
                perm.col_len(),
                self.rows,
                self.cols
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(perm.row(i), perm.col(j))
        }))
    }

    /// Matrix product with a column vector given as a slice.
    pub fn mat_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "mat_vec: length mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Transposed matrix product `A^T x`.
    pub fn mat_tvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows, "mat_tvec: length mismatch");
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        out
    }
}

impl<T: Real> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

/// Binary reveal pattern: 1 marks a revealed entry, 0 a hidden one.
#[derive(Debug, Clone, PartialEq)]
pub struct RevealMask<T: Real> {
    matrix: DenseMatrix<T>,
}

impl<T: Real> RevealMask<T> {
    /// Wraps a matrix whose entries are exactly 0 or 1.
    pub fn from_matrix(matrix: DenseMatrix<T>) -> Result<Self> {
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                let v = matrix.get(i, j);
                if v != T::zero() && v != T::one() {
                    return Err(Error::InvalidInput(format!(
                        "mask entry ({i},{j}) = {v} is not 0 or 1"
                    )));
                }
            }
        }
        Ok(Self { matrix })
    }

    /// Builds a mask from a boolean predicate.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        Self {
            matrix: DenseMatrix::from_fn(rows, cols, |i, j| {
                if f(i, j) {
                    T::one()
                } else {
                    T::zero()
                }
            }),
        }
    }

    /// Fully revealed pattern.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| true)
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// The underlying 0/1 matrix.
    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn is_revealed(&self, i: usize, j: usize) -> bool {
        self.matrix.get(i, j) == T::one()
    }

    /// Number of revealed entries.
    pub fn count_revealed(&self) -> usize {
        (0..self.rows())
            .map(|i| (0..self.cols()).filter(|&j| self.is_revealed(i, j)).count())
            .sum()
    }

    /// Fraction of entries revealed.
    pub fn density(&self) -> T {
        T::of_usize(self.count_revealed()) / T::of_usize(self.rows() * self.cols())
    }

    /// Mask with revealed and hidden entries swapped.
    pub fn complement(&self) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| !self.is_revealed(i, j))
    }

    /// Relabels rows and columns like [`DenseMatrix::apply_perm`].
    pub fn apply_perm(&self, perm: &PermPair) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.apply_perm(perm)?,
        })
    }
}

/// A pair of permutations relabelling rows and columns.
///
/// `row[i]` is the source row placed at position `i`, so applying the pair
/// sends entry `(row[i], col[j])` to `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermPair {
    row: Vec<usize>,
    col: Vec<usize>,
}

impl PermPair {
    /// Validates that both vectors are permutations of `0..len`.
    pub fn new(row: Vec<usize>, col: Vec<usize>) -> Result<Self> {
        for (name, p) in [("row", &row), ("col", &col)] {
            let mut seen = vec![false; p.len()];
            for &v in p {
                if v >= p.len() || seen[v] {
                    return Err(Error::InvalidInput(format!(
                        "{name} permutation is not a bijection on 0..{}",
                        p.len()
                    )));
                }
                seen[v] = true;
            }
            if p.is_empty() {
                return Err(Error::InvalidInput("empty permutation".into()));
            }
        }
        Ok(Self { row, col })
    }

    pub fn identity(rows: usize, cols: usize) -> Self {
        Self {
            row: (0..rows).collect(),
            col: (0..cols).collect(),
        }
    }

    pub fn row(&self, i: usize) -> usize {
        self.row[i]
    }

    pub fn col(&self, j: usize) -> usize {
        self.col[j]
    }

    pub fn row_len(&self) -> usize {
        self.row.len()
    }

    pub fn col_len(&self) -> usize {
        self.col.len()
    }

    pub fn row_slice(&self) -> &[usize] {
        &self.row
    }

    pub fn col_slice(&self) -> &[usize] {
        &self.col
    }

    /// Composition satisfying
    /// `a.apply_perm(p).apply_perm(q) == a.apply_perm(p.compose(q))`.
    pub fn compose(&self, later: &PermPair) -> Result<PermPair> {
        if self.row_len() != later.row_len() || self.col_len() != later.col_len() {
            return Err(Error::DimensionMismatch(
                "composing permutations of different sizes".into(),
            ));
        }
        PermPair::new(
            later.row.iter().map(|&i| self.row[i]).collect(),
            later.col.iter().map(|&j| self.col[j]).collect(),
        )
    }

    /// Inverse pair: `p.compose(p.inverse())` is the identity.
    pub fn inverse(&self) -> PermPair {
        let mut row = vec![0; self.row.len()];
        let mut col = vec![0; self.col.len()];
        for (i, &v) in self.row.iter().enumerate() {
            row[v] = i;
        }
        for (j, &v) in self.col.iter().enumerate() {
            col[v] = j;
        }
        PermPair { row, col }
    }
}
