//! Step graphons: piecewise-constant kernels on a product grid.

use crate::error::{Error, Result};
use crate::graphon::Graphon;
use crate::matcore::DenseMatrix;
use crate::scalar::Real;

/// Piecewise-constant kernel: value `values[a][b]` on the open block
/// `(row_breaks[a], row_breaks[a+1]) x (col_breaks[b], col_breaks[b+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon<T: Real> {
    row_breaks: Vec<T>,
    col_breaks: Vec<T>,
    values: DenseMatrix<T>,
}

impl<T: Real> StepGraphon<T> {
    /// Validates breakpoints (strictly increasing from 0 to 1) and block
    /// values (inside `[0,1]`).
    pub fn new(row_breaks: Vec<T>, col_breaks: Vec<T>, values: DenseMatrix<T>) -> Result<Self> {
        for (name, breaks) in [("row", &row_breaks), ("col", &col_breaks)] {
            if breaks.len() < 2 {
                return Err(Error::InvalidInput(format!(
                    "{name} breakpoints need at least two entries"
                )));
            }
            if breaks[0] != T::zero() || *breaks.last().unwrap() != T::one() {
                return Err(Error::InvalidInput(format!(
                    "{name} breakpoints must start at 0 and end at 1"
                )));
            }
            if breaks.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInput(format!(
                    "{name} breakpoints must be strictly increasing"
                )));
            }
        }
        if values.rows() != row_breaks.len() - 1 || values.cols() != col_breaks.len() - 1 {
            return Err(Error::DimensionMismatch(format!(
                "value grid {}x{} does not match {}x{} blocks",
                values.rows(),
                values.cols(),
                row_breaks.len() - 1,
                col_breaks.len() - 1
            )));
        }
        for i in 0..values.rows() {
            for j in 0..values.cols() {
                let v = values.get(i, j);
                if v < T::zero() || v > T::one() {
                    return Err(Error::InvalidInput(format!(
                        "block value ({i},{j}) = {v} outside [0,1]"
                    )));
                }
            }
        }
        Ok(Self {
            row_breaks,
            col_breaks,
            values,
        })
    }

    /// Constant kernel `W == value`.
    pub fn constant(value: T) -> Result<Self> {
        Self::new(
            vec![T::zero(), T::one()],
            vec![T::zero(), T::one()],
            DenseMatrix::constant(1, 1, value),
        )
    }

    /// `W = 1` for `x <= 1/2`, else 0: the limit of reveal patterns whose
    /// top half rows are fully revealed.
    pub fn half_plane() -> Self {
        let half = T::of(0.5);
        Self::new(
            vec![T::zero(), half, T::one()],
            vec![T::zero(), T::one()],
            DenseMatrix::from_rows(vec![vec![T::one()], vec![T::zero()]]).unwrap(),
        )
        .expect("static kernel is valid")
    }

    /// Ones on the two diagonal quadrants, zeros off-diagonal: the limit of
    /// the permuted parity patterns.
    pub fn two_block_diagonal() -> Self {
        let half = T::of(0.5);
        Self::new(
            vec![T::zero(), half, T::one()],
            vec![T::zero(), half, T::one()],
            DenseMatrix::from_rows(vec![
                vec![T::one(), T::zero()],
                vec![T::zero(), T::one()],
            ])
            .unwrap(),
        )
        .expect("static kernel is valid")
    }

    pub fn row_breaks(&self) -> &[T] {
        &self.row_breaks
    }

    pub fn col_breaks(&self) -> &[T] {
        &self.col_breaks
    }

    pub fn values(&self) -> &DenseMatrix<T> {
        &self.values
    }

    /// Kernel value at a point; blocks are right-open except the last.
    pub fn value_at(&self, x: T, y: T) -> T {
        let a = locate(&self.row_breaks, x);
        let b = locate(&self.col_breaks, y);
        self.values.get(a, b)
    }

    /// Exact L1 distance to another step kernel, via the common refinement
    /// of both breakpoint grids.
    pub fn l1_distance(&self, other: &StepGraphon<T>) -> T {
        let rows = merge_breaks(&[self.row_breaks.clone(), other.row_breaks.clone()]);
        let cols = merge_breaks(&[self.col_breaks.clone(), other.col_breaks.clone()]);
        let mut total = T::zero();
        for ra in rows.windows(2) {
            let midr = (ra[0] + ra[1]) * T::of(0.5);
            let hr = ra[1] - ra[0];
            for ca in cols.windows(2) {
                let midc = (ca[0] + ca[1]) * T::of(0.5);
                let hc = ca[1] - ca[0];
                total += (self.value_at(midr, midc) - other.value_at(midr, midc)).abs() * hr * hc;
            }
        }
        total
    }

    /// Pointwise average of several step kernels on the common refinement.
    pub fn average(kernels: &[StepGraphon<T>]) -> Result<StepGraphon<T>> {
        if kernels.is_empty() {
            return Err(Error::InvalidInput("cannot average zero kernels".into()));
        }
        let rows = merge_breaks(
            &kernels
                .iter()
                .map(|k| k.row_breaks.clone())
                .collect::<Vec<_>>(),
        );
        let cols = merge_breaks(
            &kernels
                .iter()
                .map(|k| k.col_breaks.clone())
                .collect::<Vec<_>>(),
        );
        let count = T::of_usize(kernels.len());
        let values = DenseMatrix::from_fn(rows.len() - 1, cols.len() - 1, |a, b| {
            let x = (rows[a] + rows[a + 1]) * T::of(0.5);
            let y = (cols[b] + cols[b + 1]) * T::of(0.5);
            let sum = kernels
                .iter()
                .fold(T::zero(), |acc, k| acc + k.value_at(x, y));
            // Clamp away any rounding excursion outside [0,1].
            (sum / count).max(T::zero()).min(T::one())
        });
        StepGraphon::new(rows, cols, values)
    }
}

impl<T: Real> Graphon<T> for StepGraphon<T> {
    fn discretize(&self, m: usize, n: usize) -> Result<DenseMatrix<T>> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput("discretization needs m, n >= 1".into()));
        }
        // overlap[a][i] = length of intersection of row block a with cell i.
        let row_overlap = overlaps(&self.row_breaks, m);
        let col_overlap = overlaps(&self.col_breaks, n);
        // Normalizing by the accumulated overlap widths (rather than the
        // nominal cell area 1/(m*n)) keeps each entry an exact convex
        // combination of block values despite rounding in the overlaps.
        let row_width: Vec<T> = (0..m)
            .map(|i| row_overlap.iter().fold(T::zero(), |s, o| s + o[i]))
            .collect();
        let col_width: Vec<T> = (0..n)
            .map(|j| col_overlap.iter().fold(T::zero(), |s, o| s + o[j]))
            .collect();
        Ok(DenseMatrix::from_fn(m, n, |i, j| {
            let mut acc = T::zero();
            for a in 0..self.values.rows() {
                let ra = row_overlap[a][i];
                if ra == T::zero() {
                    continue;
                }
                for b in 0..self.values.cols() {
                    acc += ra * col_overlap[b][j] * self.values.get(a, b);
                }
            }
            acc / (row_width[i] * col_width[j])
        }))
    }

    fn zero_measure(&self, eta: T) -> Result<T> {
        let mut total = T::zero();
        for a in 0..self.values.rows() {
            let hr = self.row_breaks[a + 1] - self.row_breaks[a];
            for b in 0..self.values.cols() {
                if self.values.get(a, b) <= eta {
                    total += hr * (self.col_breaks[b + 1] - self.col_breaks[b]);
                }
            }
        }
        Ok(total)
    }

    fn measure_resolution(&self) -> Option<f64> {
        None
    }
}

fn locate<T: Real>(breaks: &[T], x: T) -> usize {
    let last = breaks.len() - 2;
    for a in 0..=last {
        if x < breaks[a + 1] {
            return a;
        }
    }
    last
}

fn merge_breaks<T: Real>(lists: &[Vec<T>]) -> Vec<T> {
    let mut all: Vec<T> = lists.iter().flatten().copied().collect();
    all.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    all.dedup();
    all
}

fn overlaps<T: Real>(breaks: &[T], cells: usize) -> Vec<Vec<T>> {
    let h = T::one() / T::of_usize(cells);
    (0..breaks.len() - 1)
        .map(|a| {
            (0..cells)
                .map(|i| {
                    let lo = breaks[a].max(h * T::of_usize(i));
                    let hi = breaks[a + 1].min(h * T::of_usize(i + 1));
                    (hi - lo).max(T::zero())
                })
                .collect()
        })
        .collect()
}
