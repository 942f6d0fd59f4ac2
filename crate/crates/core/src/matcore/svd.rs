//! Singular value decomposition via one-sided Jacobi rotations.
//!
//! Cyclic sweeps orthogonalize column pairs of a working copy until every
//! pairwise inner product is negligible relative to the column norms. The
//! method is slower than blocked bidiagonalization but deterministic,
//! dependency-free, and accurate to high relative precision, which the
//! singular-vector bound checks downstream rely on.

use crate::error::Result;
use crate::matcore::DenseMatrix;
use crate::scalar::Real;

/// Relative threshold below which a column pair counts as orthogonal.
const JACOBI_REL_TOL: f64 = 1e-14;
/// Singular values below this fraction of the largest are treated as zero.
const RANK_REL_CUTOFF: f64 = 1e-12;
/// Hard cap on cyclic sweeps; convergence is normally reached well before.
const MAX_SWEEPS: usize = 64;

/// Thin SVD `A = sum_i sigma_i * u_i * v_i^T` with strictly positive,
/// non-increasing singular values.
#[derive(Debug, Clone)]
pub struct SvdFactors<T: Real> {
    rows: usize,
    cols: usize,
    /// Left singular vectors, each of length `rows`.
    pub u: Vec<Vec<T>>,
    /// Singular values, non-increasing.
    pub sigma: Vec<T>,
    /// Right singular vectors, each of length `cols`.
    pub v: Vec<Vec<T>>,
}

impl<T: Real> SvdFactors<T> {
    /// Number of retained singular triples.
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// Shape of the decomposed matrix.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Rebuilds `sum_i sigma_i u_i v_i^T`.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let mut data = vec![T::zero(); self.rows * self.cols];
        for ((u, &s), v) in self.u.iter().zip(&self.sigma).zip(&self.v) {
            for i in 0..self.rows {
                let su = s * u[i];
                let row = &mut data[i * self.cols..(i + 1) * self.cols];
                for (d, &vj) in row.iter_mut().zip(v) {
                    *d += su * vj;
                }
            }
        }
        DenseMatrix::from_vec(self.rows, self.cols, data)
            .expect("reconstruction of a valid SVD is finite")
    }

    /// Reconstruction keeping only the `k` leading triples.
    pub fn truncate(&self, k: usize) -> SvdFactors<T> {
        let k = k.min(self.rank());
        SvdFactors {
            rows: self.rows,
            cols: self.cols,
            u: self.u[..k].to_vec(),
            sigma: self.sigma[..k].to_vec(),
            v: self.v[..k].to_vec(),
        }
    }
}

/// Computes the thin SVD of `a`.
///
/// The zero matrix yields an empty factor list. Singular values smaller
/// than `1e-12` times the largest are dropped as numerical rank deficiency.
pub fn svd<T: Real>(a: &DenseMatrix<T>) -> SvdFactors<T> {
    let (m, n) = a.shape();
    if m < n {
        // Work on the transpose so the Gram sweeps run over the shorter side.
        let t = svd(&a.transpose());
        return SvdFactors {
            rows: m,
            cols: n,
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
    }

    // Column-major working copy; rotations combine whole columns.
    let mut b: Vec<Vec<T>> = (0..n)
        .map(|j| (0..m).map(|i| a.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut col = vec![T::zero(); n];
            col[j] = T::one();
            col
        })
        .collect();

    // f32 cannot reach 1e-14 relative; fall back to a few epsilons.
    let tol = T::of(JACOBI_REL_TOL).max(T::epsilon() * T::of(8.0));

    for _ in 0..MAX_SWEEPS {
        let mut converged = true;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (app, aqq, apq) = gram_entries(&b[p], &b[q]);
                if apq.abs() <= tol * (app * aqq).sqrt() {
                    continue;
                }
                converged = false;
                let tau = (aqq - app) / (apq + apq);
                let t = tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut b, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
            }
        }
        if converged {
            break;
        }
    }

    let mut norms: Vec<T> = b
        .iter()
        .map(|col| col.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let sigma_max = order.first().map_or(T::zero(), |&i| norms[i]);
    let cutoff = sigma_max * T::of(RANK_REL_CUTOFF);

    let mut u_out = Vec::new();
    let mut s_out = Vec::new();
    let mut v_out = Vec::new();
    for &j in &order {
        if norms[j] <= cutoff || norms[j] == T::zero() {
            break;
        }
        let inv = T::one() / norms[j];
        u_out.push(b[j].iter().map(|&x| x * inv).collect());
        s_out.push(std::mem::replace(&mut norms[j], T::zero()));
        v_out.push(v[j].clone());
    }

    SvdFactors {
        rows: m,
        cols: n,
        u: u_out,
        sigma: s_out,
        v: v_out,
    }
}

/// Sum of singular values.
pub fn nuclear_norm<T: Real>(a: &DenseMatrix<T>) -> T {
    svd(a).sigma.iter().fold(T::zero(), |acc, &s| acc + s)
}

/// Largest singular value; cheaper than asking for the full factor set only
/// in intent, the work is shared with [`svd`].
pub fn operator_norm<T: Real>(a: &DenseMatrix<T>) -> T {
    svd(a).sigma.first().copied().unwrap_or_else(T::zero)
}

fn gram_entries<T: Real>(bp: &[T], bq: &[T]) -> (T, T, T) {
    let mut app = T::zero();
    let mut aqq = T::zero();
    let mut apq = T::zero();
    for (&x, &y) in bp.iter().zip(bq) {
        app += x * x;
        aqq += y * y;
        apq += x * y;
    }
    (app, aqq, apq)
}

fn rotate_pair<T: Real>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Checks that `factors` reproduces `a` to the stated relative tolerance in
/// averaged Frobenius norm; used by tests and the acceptance suite.
pub fn reconstruction_error<T: Real>(a: &DenseMatrix<T>, factors: &SvdFactors<T>) -> Result<T> {
    let diff = a.sub(&factors.reconstruct());
    let denom = a.avg_frobenius().max(T::epsilon());
    Ok(diff.avg_frobenius() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mat(rows: Vec<Vec<f64>>) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(rows).unwrap()
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn diagonal_matrix_has_its_diagonal_as_spectrum() {
        let a = mat(vec![vec![3.0, 0.0], vec![0.0, 1.0]]);
        let f = svd(&a);
        assert_eq!(f.rank(), 2);
        assert_abs_diff_eq!(f.sigma[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.sigma[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_matrix_has_empty_factorization() {
        let f = svd(&DenseMatrix::<f64>::zeros(4, 3));
        assert_eq!(f.rank(), 0);
        assert_eq!(f.reconstruct(), DenseMatrix::zeros(4, 3));
        assert_eq!(nuclear_norm(&DenseMatrix::<f64>::zeros(4, 3)), 0.0);
    }

    #[test]
    fn rank_one_product_recovers_factors() {
        let u = [1.0, -2.0, 0.5];
        let v = [3.0, 1.0];
        let a = DenseMatrix::from_fn(3, 2, |i, j| u[i] * v[j]);
        let f = svd(&a);
        assert_eq!(f.rank(), 1);
        let expected = (u.iter().map(|x| x * x).sum::<f64>()
            * v.iter().map(|x| x * x).sum::<f64>())
        .sqrt();
        assert_abs_diff_eq!(f.sigma[0], expected, epsilon = 1e-12);
        assert!(reconstruction_error(&a, &f).unwrap() < 1e-12);
    }

    #[test]
    fn factors_are_orthonormal_and_reconstruct() {
        // Deterministic full-rank test matrix, wide on purpose to cover the
        // transpose path.
        let a = DenseMatrix::from_fn(5, 8, |i, j| {
            ((i * 31 + j * 17 + 3) % 13) as f64 / 6.5 - 1.0
        });
        let f = svd(&a);
        assert_eq!(f.rank(), 5);
        for i in 0..f.rank() {
            for j in i..f.rank() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot(&f.u[i], &f.u[j]), expect, epsilon = 1e-10);
                assert_abs_diff_eq!(dot(&f.v[i], &f.v[j]), expect, epsilon = 1e-10);
            }
        }
        for w in f.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(reconstruction_error(&a, &f).unwrap() < 1e-10);
    }

    #[test]
    fn large_reconstruction_meets_tolerance() {
        // Covers the upper end of the supported sizes, including m < n.
        let a = DenseMatrix::from_fn(320, 512, |i, j| {
            (((i * 131 + j * 73 + 7) % 509) as f64 / 254.0 - 1.0).sin()
        });
        let f = svd(&a);
        assert!(reconstruction_error(&a, &f).unwrap() < 1e-10);
    }

    #[test]
    fn rank_deficiency_is_detected() {
        // Two identical columns plus one independent: rank 2.
        let a = mat(vec![
            vec![1.0, 1.0, 2.0],
            vec![2.0, 2.0, -1.0],
            vec![3.0, 3.0, 0.5],
        ]);
        assert_eq!(svd(&a).rank(), 2);
    }

    #[test]
    fn nuclear_norm_of_diagonal_is_abs_sum() {
        let a = mat(vec![vec![2.0, 0.0], vec![0.0, -5.0]]);
        assert_abs_diff_eq!(nuclear_norm(&a), 7.0, epsilon = 1e-12);
    }

    #[test]
    fn f32_instantiation_works_at_reduced_precision() {
        let a = DenseMatrix::<f32>::from_fn(6, 4, |i, j| ((i + 2 * j) % 5) as f32 - 2.0);
        let f = svd(&a);
        let err = a.sub(&f.reconstruct()).avg_frobenius() / a.avg_frobenius();
        assert!(err < 1e-5, "f32 reconstruction error {err}");
    }
}
