//! Nuclear-norm minimization subject to revealed-entry agreement, with an
//! optional box constraint on all entries.
//!
//! The problem `min ||B||_* s.t. B agrees with the data on revealed entries
//! (and ||B||_inf <= L in the box-constrained variant)` is solved by a
//! two-block operator-splitting iteration: one block applies the proximal
//! map of the nuclear norm (singular-value thresholding), the other
//! projects onto the feasible set exactly; a scaled dual variable couples
//! them and over-relaxation accelerates the exchange.

use crate::error::{Error, Result};
use crate::matcore::{nuclear_norm, svd, DenseMatrix, RevealMask};
use crate::scalar::Real;

/// Parameters of the splitting iteration.
#[derive(Debug, Clone)]
pub struct SolverConfig<T: Real> {
    /// Coupling penalty; the threshold of the prox step is its reciprocal.
    pub penalty: T,
    pub max_iters: usize,
    /// Stop when the primal residual (disagreement of the two blocks, in
    /// averaged Frobenius norm) falls below this.
    pub primal_tol: T,
    /// Stop when the dual residual (scaled successive change of the
    /// feasible block) falls below this.
    pub dual_tol: T,
    /// Over-relaxation factor in `[1, 1.9]`.
    pub over_relaxation: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            penalty: T::one(),
            max_iters: 2000,
            primal_tol: T::of(1e-6),
            dual_tol: T::of(1e-6),
            over_relaxation: T::of(1.6),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    fn validate(&self) -> Result<()> {
        if !(self.penalty > T::zero()) {
            return Err(Error::InvalidInput("penalty must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        if !(self.primal_tol > T::zero()) || !(self.dual_tol > T::zero()) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        let a = self.over_relaxation;
        if !(a >= T::one() && a <= T::of(1.9)) {
            return Err(Error::InvalidInput(format!(
                "over-relaxation {a} outside [1, 1.9]"
            )));
        }
        Ok(())
    }
}

/// Outcome of a completion solve. `estimate` is always exactly feasible
/// because the feasible block is reported; non-convergence is recorded in
/// `converged`, not raised as an error.
#[derive(Debug, Clone)]
pub struct CompletionResult<T: Real> {
    pub estimate: DenseMatrix<T>,
    /// Nuclear norm of `estimate`.
    pub nuclear_norm: T,
    pub iterations: usize,
    pub primal_residual: T,
    pub dual_residual: T,
    /// Worst violation of revealed-entry agreement or the box by
    /// `estimate`; zero up to roundoff by construction.
    pub feasibility_gap: T,
    pub converged: bool,
    /// `(primal, dual)` residuals per iteration, for logging.
    pub residual_history: Vec<(T, T)>,
}

/// Singular-value thresholding: the proximal map of `t * ||.||_*`. Each
/// singular value is shrunk by `t` and clipped at zero.
pub fn svt<T: Real>(a: &DenseMatrix<T>, t: T) -> Result<DenseMatrix<T>> {
    if t < T::zero() {
        return Err(Error::InvalidInput(format!("threshold {t} must be >= 0")));
    }
    if t == T::zero() {
        return Ok(a.clone());
    }
    let f = svd(a);
    let mut out = vec![T::zero(); a.rows() * a.cols()];
    let n = a.cols();
    for ((u, &s), v) in f.u.iter().zip(&f.sigma).zip(&f.v) {
        if s <= t {
            // Non-increasing order: everything after is shrunk to zero too.
            break;
        }
        let shrunk = s - t;
        for (i, &ui) in u.iter().enumerate() {
            let su = shrunk * ui;
            let row = &mut out[i * n..(i + 1) * n];
            for (o, &vj) in row.iter_mut().zip(v) {
                *o += su * vj;
            }
        }
    }
    DenseMatrix::from_vec(a.rows(), a.cols(), out)
}

/// Exact projection onto the feasible set: revealed positions are forced to
/// the revealed values, hidden ones are clamped into `[-box_bound, box_bound]`.
/// Errors when a revealed value itself violates the box (empty feasible set).
pub fn project_feasible<T: Real>(
    b: &DenseMatrix<T>,
    revealed: &DenseMatrix<T>,
    mask: &RevealMask<T>,
    box_bound: T,
) -> Result<DenseMatrix<T>> {
    check_problem(revealed, mask)?;
    if b.shape() != revealed.shape() {
        return Err(Error::DimensionMismatch(format!(
            "iterate {:?} vs data {:?}",
            b.shape(),
            revealed.shape()
        )));
    }
    if !(box_bound > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "box bound {box_bound} must be positive"
        )));
    }
    check_box_feasible(revealed, mask, box_bound)?;
    Ok(DenseMatrix::from_fn(b.rows(), b.cols(), |i, j| {
        if mask.is_revealed(i, j) {
            revealed.get(i, j)
        } else {
            b.get(i, j).max(-box_bound).min(box_bound)
        }
    }))
}

/// Box-constrained estimator: minimum nuclear norm among matrices that
/// agree with the revealed entries and satisfy `||B||_inf <= box_bound`.
pub fn complete_modified_cr<T: Real>(
    revealed: &DenseMatrix<T>,
    mask: &RevealMask<T>,
    box_bound: T,
    config: &SolverConfig<T>,
) -> Result<CompletionResult<T>> {
    if !(box_bound > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "box bound {box_bound} must be positive"
        )));
    }
    check_box_feasible(revealed, mask, box_bound)?;
    complete_inner(revealed, mask, Some(box_bound), config)
}

/// Unconstrained variant: minimum nuclear norm subject only to
/// revealed-entry agreement.
pub fn complete_plain_cr<T: Real>(
    revealed: &DenseMatrix<T>,
    mask: &RevealMask<T>,
    config: &SolverConfig<T>,
) -> Result<CompletionResult<T>> {
    complete_inner(revealed, mask, None, config)
}

fn complete_inner<T: Real>(
    revealed: &DenseMatrix<T>,
    mask: &RevealMask<T>,
    box_bound: Option<T>,
    config: &SolverConfig<T>,
) -> Result<CompletionResult<T>> {
    config.validate()?;
    check_problem(revealed, mask)?;
    let (m, n) = revealed.shape();

    let project = |b: &DenseMatrix<T>| -> DenseMatrix<T> {
        DenseMatrix::from_fn(m, n, |i, j| {
            if mask.is_revealed(i, j) {
                revealed.get(i, j)
            } else {
                let v = b.get(i, j);
                match box_bound {
                    Some(l) => v.max(-l).min(l),
                    None => v,
                }
            }
        })
    };

    let threshold = T::one() / config.penalty;
    let alpha = config.over_relaxation;
    let one_minus_alpha = T::one() - alpha;

    // Feasible block starts at the revealed data (hidden entries zero);
    // the dual starts at zero.
    let mut z = revealed.hadamard(mask.matrix())?;
    let mut dual = DenseMatrix::zeros(m, n);

    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut primal = T::infinity();
    let mut dual_res = T::infinity();

    for it in 1..=config.max_iters {
        iterations = it;
        // Prox block.
        let b = svt(&z.sub(&dual), threshold)?;
        // Over-relaxed exchange.
        let b_hat = b.scale(alpha).add(&z.scale(one_minus_alpha));
        // Feasible block.
        let z_new = project(&b_hat.add(&dual));
        // Dual ascent.
        dual = dual.add(&b_hat).sub(&z_new);

        primal = b.sub(&z_new).avg_frobenius();
        dual_res = z_new.sub(&z).avg_frobenius() * config.penalty;
        z = z_new;
        history.push((primal, dual_res));

        if primal <= config.primal_tol && dual_res <= config.dual_tol {
            converged = true;
            break;
        }
    }

    let feasibility_gap = feasibility_gap(&z, revealed, mask, box_bound);
    Ok(CompletionResult {
        nuclear_norm: nuclear_norm(&z),
        estimate: z,
        iterations,
        primal_residual: primal,
        dual_residual: dual_res,
        feasibility_gap,
        converged,
        residual_history: history,
    })
}

fn check_problem<T: Real>(revealed: &DenseMatrix<T>, mask: &RevealMask<T>) -> Result<()> {
    if revealed.shape() != (mask.rows(), mask.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "data {:?} vs mask {}x{}",
            revealed.shape(),
            mask.rows(),
            mask.cols()
        )));
    }
    if mask.count_revealed() == 0 {
        return Err(Error::InvalidInput(
            "mask reveals no entries; the problem is vacuous".into(),
        ));
    }
    Ok(())
}

fn check_box_feasible<T: Real>(
    revealed: &DenseMatrix<T>,
    mask: &RevealMask<T>,
    box_bound: T,
) -> Result<()> {
    for i in 0..mask.rows() {
        for j in 0..mask.cols() {
            if mask.is_revealed(i, j) && revealed.get(i, j).abs() > box_bound {
                return Err(Error::Infeasible(format!(
                    "revealed entry ({i},{j}) = {} exceeds the box bound {box_bound}",
                    revealed.get(i, j)
                )));
            }
        }
    }
    Ok(())
}

fn feasibility_gap<T: Real>(
    estimate: &DenseMatrix<T>,
    revealed: &DenseMatrix<T>,
    mask: &RevealMask<T>,
    box_bound: Option<T>,
) -> T {
    let mut gap = T::zero();
    for i in 0..mask.rows() {
        for j in 0..mask.cols() {
            if mask.is_revealed(i, j) {
                gap = gap.max((estimate.get(i, j) - revealed.get(i, j)).abs());
            } else if let Some(l) = box_bound {
                gap = gap.max(estimate.get(i, j).abs() - l);
            }
        }
    }
    gap.max(T::zero())
}
