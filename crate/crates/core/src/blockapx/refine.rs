//! Partition refinement sequences, the block transfer inequality, and a
//! finite step-kernel limit estimate built from mask sequences.

use std::collections::BTreeMap;

use crate::cutmetric::{cut_norm_exact, cut_norm_upper};
use crate::error::{Error, Result};
use crate::graphon::StepGraphon;
use crate::matcore::{svd, DenseMatrix, RevealMask};
use crate::scalar::Real;

use super::partition::{block_average, max_block_deviation, Partition, PartitionPair};

/// Deepest refinement level; class-count bounds grow doubly exponentially
/// beyond this.
pub const MAX_REFINE_LEVEL: usize = 8;

/// Exact cut norms are used for certification when the shorter matrix side
/// is at most this, otherwise the cheap certified upper bound stands in.
const CERTIFY_EXACT_LIMIT: usize = 16;

/// Tolerance on block-constancy of transfer-bound inputs.
const BLOCK_CONSTANCY_TOL: f64 = 1e-9;

/// Outcome of checking a certified residual bound against its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    /// The certified bound (exact value or valid upper bound) is within
    /// the target, which proves the inequality.
    Certified,
    /// The upper bound exceeds the target but the exact value is unknown;
    /// nothing is proved either way.
    Inconclusive,
    /// The exact residual cut norm exceeds the target.
    Violated,
}

/// One level of a refinement sequence.
#[derive(Debug, Clone)]
pub struct RefinementLevel<T: Real> {
    /// Level index `j >= 1`.
    pub j: usize,
    /// Row/column classes of equal rounded singular-vector profiles.
    pub partition: PartitionPair,
    /// The input averaged over the level's blocks.
    pub averaged: DenseMatrix<T>,
    /// Certified cut-norm bound on `input - averaged`.
    pub residual_bound: T,
    /// Whether `residual_bound` is the exact cut norm.
    pub bound_is_exact: bool,
    /// The guaranteed bound `2/j + 6 j^3 2^(-j)` the residual must meet.
    pub target: T,
    /// Verdict of `residual_bound` against `target`.
    pub status: BoundStatus,
}

/// Nested block structures of increasing resolution for one matrix.
#[derive(Debug, Clone)]
pub struct RefinementSequence<T: Real> {
    /// Levels `j = 1 ..= j_max`, coarsest first; each level's partitions
    /// refine the previous level's.
    pub levels: Vec<RefinementLevel<T>>,
}

/// Index of the largest grid multiple not exceeding `x`, with values
/// within a hair of an exact multiple snapped onto it. Mathematically
/// equal components can come out of the factorization a final bit apart;
/// without the snap, such a pair straddling a grid line would split one
/// class in two.
fn snapped_floor<T: Real>(x: T, grid: T) -> i64 {
    let y = x / grid;
    let r = y.round();
    let label = if (y - r).abs() <= T::of(1e-9) * r.abs().max(T::one()) {
        r
    } else {
        y.floor()
    };
    label.to_i64().expect("profile label fits i64 for j <= 8")
}

/// Groups indices by equal integer profiles; classes are ordered by their
/// smallest member and list members in increasing order.
fn classes_by_profile(profiles: Vec<Vec<i64>>) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (idx, key) in profiles.into_iter().enumerate() {
        groups.entry(key).or_default().push(idx);
    }
    let mut classes: Vec<Vec<usize>> = groups.into_values().collect();
    classes.sort_by_key(|class| class[0]);
    classes
}

/// Builds increasingly fine block structures for `a` and certifies at each
/// level that the averaged residual is small in cut norm.
///
/// Level `j` keeps singular values above `sqrt(m*n)/j` and rounds the kept
/// singular-vector components down to the largest integer multiple of
/// `2^(-j) m^(-1/2)` (rows) or `2^(-j) n^(-1/2)` (columns) not exceeding
/// them; rows or columns with identical rounded profiles share a class.
/// Requires entries in `[-1, 1]` and `1 <= j_max <= 8`.
pub fn refinement_sequence<T: Real>(
    a: &DenseMatrix<T>,
    j_max: usize,
) -> Result<RefinementSequence<T>> {
    if a.linf_norm() > T::one() + T::of(1e-12) {
        return Err(Error::InvalidInput(format!(
            "entries must lie in [-1, 1]; max magnitude is {}",
            a.linf_norm()
        )));
    }
    if j_max == 0 {
        return Err(Error::InvalidInput("j_max must be at least 1".into()));
    }
    if j_max > MAX_REFINE_LEVEL {
        return Err(Error::TooLarge(format!(
            "j_max = {j_max} exceeds the supported maximum {MAX_REFINE_LEVEL}"
        )));
    }
    let (m, n) = a.shape();
    let root_mn = (T::of_usize(m) * T::of_usize(n)).sqrt();
    let factors = svd(a);
    let mut levels = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let threshold = root_mn / T::of_usize(j);
        let kept: Vec<usize> = (0..factors.rank())
            .filter(|&i| factors.sigma[i] > threshold)
            .collect();
        let pow = T::of(2.0).powi(-(j as i32));
        let grid_u = pow / T::of_usize(m).sqrt();
        let grid_v = pow / T::of_usize(n).sqrt();
        let row_profiles: Vec<Vec<i64>> = (0..m)
            .map(|r| {
                kept.iter()
                    .map(|&i| snapped_floor(factors.u[i][r], grid_u))
                    .collect()
            })
            .collect();
        let col_profiles: Vec<Vec<i64>> = (0..n)
            .map(|c| {
                kept.iter()
                    .map(|&i| snapped_floor(factors.v[i][c], grid_v))
                    .collect()
            })
            .collect();
        let partition = PartitionPair::new(
            Partition::new(classes_by_profile(row_profiles), m)?,
            Partition::new(classes_by_profile(col_profiles), n)?,
        );
        let averaged = block_average(a, &partition)?;
        let residual = a.sub(&averaged);
        let (residual_bound, bound_is_exact) = if m.min(n) <= CERTIFY_EXACT_LIMIT {
            (cut_norm_exact(&residual)?.upper, true)
        } else {
            (cut_norm_upper(&residual), false)
        };
        let jf = T::of_usize(j);
        let target = T::of(2.0) / jf + T::of(6.0) * jf.powi(3) * pow;
        let status = if residual_bound <= target + T::of(1e-12) {
            BoundStatus::Certified
        } else if bound_is_exact {
            BoundStatus::Violated
        } else {
            BoundStatus::Inconclusive
        };
        levels.push(RefinementLevel {
            j,
            partition,
            averaged,
            residual_bound,
            bound_is_exact,
            target,
            status,
        });
    }
    Ok(RefinementSequence { levels })
}

/// Certified comparison of masked differences across two weightings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferBound<T: Real> {
    /// `avg_frobenius((A - B) .* Q)`.
    pub lhs: T,
    /// `avg_frobenius((A - B) .* P) + sqrt(b * cut(P - Q)) * linf(A - B)`.
    pub rhs: T,
    /// The first right-hand term, `avg_frobenius((A - B) .* P)`.
    pub masked_diff: T,
    /// The certified value used for `cut(P - Q)`.
    pub cut_bound: T,
    /// Whether `cut_bound` is the exact cut norm of `P - Q`.
    pub cut_is_exact: bool,
}

/// Evaluates both sides of the block transfer inequality
/// `lhs <= rhs` for matrices `a`, `b` constant on the blocks of `part`,
/// a reveal mask `p`, and a weight matrix `q_mat` with entries in `[0, 1]`.
///
/// The cut norm of `p - q_mat` is computed exactly on small instances and
/// replaced by a certified upper bound otherwise; the inequality is
/// monotone in that value, so the returned `rhs` is always valid.
pub fn block_transfer_bound<T: Real>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    part: &PartitionPair,
    p: &RevealMask<T>,
    q_mat: &DenseMatrix<T>,
) -> Result<TransferBound<T>> {
    if a.shape() != b.shape() || a.shape() != (p.rows(), p.cols()) || a.shape() != q_mat.shape() {
        return Err(Error::DimensionMismatch(format!(
            "a, b, p, q must share a shape; got {:?}, {:?}, {:?}, {:?}",
            a.shape(),
            b.shape(),
            (p.rows(), p.cols()),
            q_mat.shape()
        )));
    }
    let tol = T::of(BLOCK_CONSTANCY_TOL);
    for (label, mat) in [("a", a), ("b", b)] {
        if max_block_deviation(mat, part)? > tol * T::one().max(mat.linf_norm()) {
            return Err(Error::InvalidInput(format!(
                "{label} is not constant on the blocks of the partition"
            )));
        }
    }
    if q_mat
        .entries()
        .iter()
        .any(|&w| w < -T::of(1e-12) || w > T::one() + T::of(1e-12))
    {
        return Err(Error::InvalidInput(
            "weight matrix entries must lie in [0, 1]".into(),
        ));
    }
    let diff = a.sub(b);
    let lhs = diff.hadamard(q_mat)?.avg_frobenius();
    let masked_diff = diff.hadamard(p.matrix())?.avg_frobenius();
    let gap = p.matrix().sub(q_mat);
    let (m, n) = gap.shape();
    let (cut_bound, cut_is_exact) = if m.min(n) <= CERTIFY_EXACT_LIMIT {
        (cut_norm_exact(&gap)?.upper, true)
    } else {
        (cut_norm_upper(&gap), false)
    };
    let blocks = T::of_usize(part.block_count());
    let rhs = masked_diff + (blocks * cut_bound).sqrt() * diff.linf_norm();
    Ok(TransferBound {
        lhs,
        rhs,
        masked_diff,
        cut_bound,
        cut_is_exact,
    })
}

/// Mean of `mat` over the given rows (all columns).
fn row_class_mean<T: Real>(mat: &DenseMatrix<T>, rows: &[usize]) -> T {
    let mut acc = T::zero();
    for &i in rows {
        for j in 0..mat.cols() {
            acc += mat.get(i, j);
        }
    }
    acc / T::of_usize(rows.len() * mat.cols())
}

/// Mean of `mat` over the given columns (all rows).
fn col_class_mean<T: Real>(mat: &DenseMatrix<T>, cols: &[usize]) -> T {
    let mut acc = T::zero();
    for &j in cols {
        for i in 0..mat.rows() {
            acc += mat.get(i, j);
        }
    }
    acc / T::of_usize(cols.len() * mat.rows())
}

/// Sorts class indices by (size descending, class mean descending,
/// smallest member ascending).
fn canonical_class_order<T: Real>(classes: &[Vec<usize>], means: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by(|&x, &y| {
        classes[y]
            .len()
            .cmp(&classes[x].len())
            .then(
                means[y]
                    .partial_cmp(&means[x])
                    .expect("class means are finite"),
            )
            .then(classes[x][0].cmp(&classes[y][0]))
    });
    order
}

/// Renders the level-`j` block average of one mask as a step kernel on
/// the unit square, with classes laid out in canonical order.
fn mask_step_kernel<T: Real>(mask: &RevealMask<T>, j: usize) -> Result<StepGraphon<T>> {
    let seq = refinement_sequence(mask.matrix(), j)?;
    let level = seq.levels.last().expect("j >= 1 yields at least one level");
    let (m, n) = level.averaged.shape();
    let row_classes = level.partition.rows.classes();
    let col_classes = level.partition.cols.classes();
    let row_means: Vec<T> = row_classes
        .iter()
        .map(|c| row_class_mean(&level.averaged, c))
        .collect();
    let col_means: Vec<T> = col_classes
        .iter()
        .map(|c| col_class_mean(&level.averaged, c))
        .collect();
    let row_order = canonical_class_order(row_classes, &row_means);
    let col_order = canonical_class_order(col_classes, &col_means);

    let breaks = |sizes: &[usize], total: usize| -> Vec<T> {
        let mut acc = 0usize;
        let mut out = vec![T::zero()];
        for &s in sizes {
            acc += s;
            out.push(T::of_usize(acc) / T::of_usize(total));
        }
        out
    };
    let row_sizes: Vec<usize> = row_order.iter().map(|&r| row_classes[r].len()).collect();
    let col_sizes: Vec<usize> = col_order.iter().map(|&c| col_classes[c].len()).collect();
    let values = DenseMatrix::from_fn(row_order.len(), col_order.len(), |r, c| {
        level
            .averaged
            .get(row_classes[row_order[r]][0], col_classes[col_order[c]][0])
    });
    StepGraphon::new(breaks(&row_sizes, m), breaks(&col_sizes, n), values)
}

/// Estimates a limiting step kernel from a sequence of reveal masks by
/// averaging their canonically ordered level-`j` block structures.
///
/// Masks must be listed with non-decreasing dimensions. The result is a
/// diagnostic object: feed it to the recovery verdict to probe whether
/// the mask family looks recoverable in the limit.
pub fn limit_estimate<T: Real>(masks: &[RevealMask<T>], j: usize) -> Result<StepGraphon<T>> {
    if masks.is_empty() {
        return Err(Error::InvalidInput(
            "limit estimation needs at least one mask".into(),
        ));
    }
    for w in masks.windows(2) {
        if w[1].rows() < w[0].rows() || w[1].cols() < w[0].cols() {
            return Err(Error::InvalidInput(
                "mask dimensions must be non-decreasing".into(),
            ));
        }
    }
    let kernels: Vec<StepGraphon<T>> = masks
        .iter()
        .map(|mask| mask_step_kernel(mask, j))
        .collect::<Result<_>>()?;
    StepGraphon::average(&kernels)
}
