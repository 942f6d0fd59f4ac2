//! Exact, lower-bound, and upper-bound cut-norm computations.

use crate::error::{Error, Result};
use crate::matcore::{operator_norm, DenseMatrix};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Largest short-side dimension accepted by [`cut_norm_exact`].
pub const EXACT_DIM_LIMIT: usize = 25;

/// A bracket on the cut norm with the witness pair realizing the lower end.
#[derive(Debug, Clone)]
pub struct CutNormEstimate<T: Real> {
    /// Certified lower bound, realized by the witnesses.
    pub lower: T,
    /// Certified upper bound.
    pub upper: T,
    /// Row multipliers in `[-1,1]` attaining `lower`.
    pub witness_x: Vec<T>,
    /// Column multipliers in `[-1,1]` attaining `lower`.
    pub witness_y: Vec<T>,
    /// True when `lower` and `upper` coincide by exhaustive search.
    pub exact: bool,
}

impl<T: Real> CutNormEstimate<T> {
    /// The witness bilinear value `|x^T A y| / (mn)`, recomputed from
    /// scratch; equals `lower` up to roundoff.
    pub fn witness_value(&self, a: &DenseMatrix<T>) -> T {
        let ax = a.mat_tvec(&self.witness_x);
        let v = ax
            .iter()
            .zip(&self.witness_y)
            .fold(T::zero(), |acc, (&z, &y)| acc + z * y);
        v.abs() / T::of_usize(a.rows() * a.cols())
    }
}

/// Exhaustive cut norm: enumerates sign vectors on the shorter dimension
/// (half of them, by the `x -> -x` symmetry) and closes the other side with
/// the sign of the matched product. Errors when `min(m,n) > 25`.
pub fn cut_norm_exact<T: Real>(a: &DenseMatrix<T>) -> Result<CutNormEstimate<T>> {
    let (m, n) = a.shape();
    if m.min(n) > EXACT_DIM_LIMIT {
        return Err(Error::TooLarge(format!(
            "exact cut norm enumerates 2^(d-1) sign vectors; min dimension {} exceeds {}",
            m.min(n),
            EXACT_DIM_LIMIT
        )));
    }
    // Work with the transpose when columns are the shorter side so the
    // enumerated vector is always the row one.
    if n < m {
        let e = cut_norm_exact(&a.transpose())?;
        return Ok(CutNormEstimate {
            lower: e.lower,
            upper: e.upper,
            witness_x: e.witness_y,
            witness_y: e.witness_x,
            exact: true,
        });
    }

    let d = m;
    let mut x = vec![T::one(); d];
    // z = A^T x, maintained incrementally across the Gray-code walk.
    let mut z = a.mat_tvec(&x);
    let mut best_raw = sum_abs(&z);
    let mut best_x = x.clone();

    // Gray code over the remaining d-1 coordinates: step g flips the bit at
    // the number of trailing zeros of g, which maps to coordinate index+1.
    let steps = 1u64 << (d - 1);
    let refresh = 1u64 << 12;
    for g in 1..steps {
        let flip = g.trailing_zeros() as usize + 1;
        x[flip] = -x[flip];
        if g % refresh == 0 {
            // Periodic fresh recomputation bounds incremental drift.
            z = a.mat_tvec(&x);
        } else {
            let two_xi = x[flip] + x[flip];
            for (zj, j) in z.iter_mut().zip(0..n) {
                *zj += two_xi * a.get(flip, j);
            }
        }
        let v = sum_abs(&z);
        if v > best_raw {
            best_raw = v;
            best_x.copy_from_slice(&x);
        }
    }

    // Recompute the winner from scratch and derive the column witness.
    let zb = a.mat_tvec(&best_x);
    let witness_y: Vec<T> = zb.iter().map(|&v| sign_plus(v)).collect();
    let value = sum_abs(&zb) / T::of_usize(m * n);
    Ok(CutNormEstimate {
        lower: value,
        upper: value,
        witness_x: best_x,
        witness_y,
        exact: true,
    })
}

/// Heuristic lower bound: seeded random sign starts improved by alternating
/// maximization (`x <- sign(Ay)`, `y <- sign(A^T x)`) until a fixed point.
/// Deterministic for a fixed `(restarts, seed)`; restarts run in parallel
/// with a fixed work split.
pub fn cut_norm_lower<T: Real>(
    a: &DenseMatrix<T>,
    restarts: usize,
    seed: u64,
) -> CutNormEstimate<T> {
    let (m, n) = a.shape();
    let runs: Vec<(T, Vec<T>, Vec<T>)> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, r));
            let mut y: Vec<T> = (0..n)
                .map(|_| if rng.gen::<bool>() { T::one() } else { -T::one() })
                .collect();
            let mut x = vec![T::one(); m];
            // Each half-step is monotone in x^T A y, so the loop terminates
            // at a sign fixed point; the cap is a safety net.
            for _ in 0..4 * (m + n) + 16 {
                let ay = a.mat_vec(&y);
                let new_x: Vec<T> = ay.iter().map(|&v| sign_plus(v)).collect();
                let atx = a.mat_tvec(&new_x);
                let new_y: Vec<T> = atx.iter().map(|&v| sign_plus(v)).collect();
                let stable = new_x == x && new_y == y;
                x = new_x;
                y = new_y;
                if stable {
                    break;
                }
            }
            let ax = a.mat_tvec(&x);
            let raw = ax
                .iter()
                .zip(&y)
                .fold(T::zero(), |acc, (&z, &yv)| acc + z * yv)
                .abs();
            (raw / T::of_usize(m * n), x, y)
        })
        .collect();

    let mut best = 0usize;
    for i in 1..runs.len() {
        if runs[i].0 > runs[best].0 {
            best = i;
        }
    }
    let (lower, witness_x, witness_y) = runs[best].clone();
    // Both ends are mathematically valid bounds; the max guards the bracket
    // invariant against last-ulp roundoff when they coincide.
    let upper = cut_norm_upper(a).max(lower);
    CutNormEstimate {
        lower,
        upper,
        witness_x,
        witness_y,
        exact: false,
    }
}

/// Certified upper bound: the smaller of the spectral bound
/// `sigma_1 / sqrt(mn)` and the mean absolute entry.
pub fn cut_norm_upper<T: Real>(a: &DenseMatrix<T>) -> T {
    let (m, n) = a.shape();
    let spectral = operator_norm(a) / T::of_usize(m * n).sqrt();
    spectral.min(a.mean_abs())
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed.wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn sum_abs<T: Real>(z: &[T]) -> T {
    z.iter().fold(T::zero(), |acc, &v| acc + v.abs())
}

/// Sign with ties resolved to +1.
fn sign_plus<T: Real>(v: T) -> T {
    if v >= T::zero() {
        T::one()
    } else {
        -T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mat(rows: Vec<Vec<f64>>) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(rows).unwrap()
    }

    /// Oracle: independent brute force over all sign pairs on both sides.
    fn brute_cut_norm(a: &DenseMatrix<f64>) -> f64 {
        let (m, n) = a.shape();
        let mut best: f64 = 0.0;
        for xm in 0..(1u32 << m) {
            let x: Vec<f64> = (0..m)
                .map(|i| if xm >> i & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            for ym in 0..(1u32 << n) {
                let mut v = 0.0;
                for i in 0..m {
                    for j in 0..n {
                        let y = if ym >> j & 1 == 1 { 1.0 } else { -1.0 };
                        v += x[i] * a.get(i, j) * y;
                    }
                }
                best = best.max(v.abs());
            }
        }
        best / (m * n) as f64
    }

    #[test]
    fn sign_pattern_matrix_has_cut_norm_one() {
        let a = mat(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let e = cut_norm_exact(&a).unwrap();
        assert_abs_diff_eq!(e.lower, 1.0, epsilon = 1e-15);
        assert!(e.exact);
        assert_abs_diff_eq!(e.witness_value(&a), e.lower, epsilon = 1e-12);
    }

    #[test]
    fn all_ones_has_cut_norm_one() {
        let a = DenseMatrix::constant(3, 5, 1.0);
        assert_abs_diff_eq!(cut_norm_exact(&a).unwrap().lower, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_matches_independent_brute_force() {
        for seed in 0..20u64 {
            let a = DenseMatrix::from_fn(5, 4, |i, j| {
                let t = (seed * 97 + (i * 7 + j * 13) as u64 % 31) as f64;
                (t * 0.7321).sin()
            });
            let e = cut_norm_exact(&a).unwrap();
            assert_abs_diff_eq!(e.lower, brute_cut_norm(&a), epsilon = 1e-12);
            assert_abs_diff_eq!(e.witness_value(&a), e.lower, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_handles_wide_and_tall_orientations() {
        let a = mat(vec![vec![0.3, -1.2, 0.8, -0.1]]);
        let e = cut_norm_exact(&a).unwrap();
        assert_abs_diff_eq!(e.lower, brute_cut_norm(&a), epsilon = 1e-14);
        let t = cut_norm_exact(&a.transpose()).unwrap();
        assert_abs_diff_eq!(t.lower, e.lower, epsilon = 1e-14);
    }

    #[test]
    fn exact_rejects_large_short_side() {
        let a = DenseMatrix::<f64>::zeros(26, 30);
        assert!(matches!(cut_norm_exact(&a), Err(Error::TooLarge(_))));
    }

    #[test]
    fn norm_chain_cut_below_avg_frobenius_below_linf() {
        for seed in 0..10u64 {
            let a = DenseMatrix::from_fn(6, 7, |i, j| {
                ((seed * 31 + (i * 11 + j * 3) as u64) as f64 * 0.517).cos()
            });
            let cut = cut_norm_exact(&a).unwrap().lower;
            assert!(cut <= a.avg_frobenius() + 1e-12);
            assert!(a.avg_frobenius() <= a.linf_norm() + 1e-12);
        }
    }

    #[test]
    fn lower_bound_is_sandwiched_and_deterministic() {
        let a = DenseMatrix::from_fn(8, 8, |i, j| (((i * 5 + j * 7) % 11) as f64 - 5.0) / 5.0);
        let exact = cut_norm_exact(&a).unwrap().lower;
        let e1 = cut_norm_lower(&a, 50, 7);
        let e2 = cut_norm_lower(&a, 50, 7);
        assert_eq!(e1.lower, e2.lower);
        assert!(e1.lower <= exact + 1e-12);
        assert!(exact <= e1.upper + 1e-12);
        assert_abs_diff_eq!(e1.witness_value(&a), e1.lower, epsilon = 1e-12);
    }

    #[test]
    fn upper_bound_is_tight_for_rank_one_sign_matrix() {
        // Checkerboard: rank one with |entries| = 1/2; spectral bound and
        // exact value agree at 1/2.
        let a = DenseMatrix::from_fn(6, 6, |i, j| {
            0.5 * if (i + j) % 2 == 0 { 1.0 } else { -1.0 }
        });
        let exact = cut_norm_exact(&a).unwrap().lower;
        assert_abs_diff_eq!(exact, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(cut_norm_upper(&a), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn permutation_invariance_of_exact_cut_norm() {
        use crate::matcore::PermPair;
        let a = DenseMatrix::from_fn(5, 6, |i, j| ((i * 17 + j * 29) % 13) as f64 / 6.0 - 1.0);
        let p = PermPair::new(vec![4, 2, 0, 1, 3], vec![5, 3, 1, 0, 2, 4]).unwrap();
        let b = a.apply_perm(&p).unwrap();
        assert_abs_diff_eq!(
            cut_norm_exact(&a).unwrap().lower,
            cut_norm_exact(&b).unwrap().lower,
            epsilon = 1e-12
        );
    }
}
