//! Graphons given by an arbitrary evaluator, integrated numerically.

use crate::error::{Error, Result};
use crate::graphon::Graphon;
use crate::matcore::DenseMatrix;
use crate::scalar::Real;

/// Relative tolerance between successive dyadic refinements of the
/// midpoint rule. Entries live on a [0,1] scale, so the comparison uses
/// `max(1, |estimate|)` as the reference.
const QUADRATURE_REL_TOL: f64 = 1e-8;
/// Cap on the sublevel-measure sampling grid: `2^12` cells per axis.
const MAX_MEASURE_EXP: usize = 12;

/// Kernel defined by a closure on the unit square.
///
/// Evaluator outputs are clamped into `[0,1]`; discretization refines a
/// midpoint rule dyadically up to `max_depth` levels and errors out with
/// the residual if the tolerance is never met.
pub struct AnalyticGraphon<T: Real> {
    eval: Box<dyn Fn(T, T) -> T + Send + Sync>,
    max_depth: usize,
}

impl<T: Real> AnalyticGraphon<T> {
    pub fn new(max_depth: usize, eval: impl Fn(T, T) -> T + Send + Sync + 'static) -> Result<Self> {
        if max_depth == 0 || max_depth > 16 {
            return Err(Error::InvalidInput(format!(
                "quadrature depth {max_depth} outside 1..=16"
            )));
        }
        Ok(Self {
            eval: Box::new(eval),
            max_depth,
        })
    }

    /// Default refinement budget of 12 levels.
    pub fn with_default_depth(eval: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        Self::new(12, eval).expect("default depth is valid")
    }

    fn at(&self, x: T, y: T) -> T {
        (self.eval)(x, y).max(T::zero()).min(T::one())
    }

    /// Mean of the kernel over a rectangle via the midpoint rule on a
    /// `2^depth x 2^depth` subgrid.
    fn cell_mean(&self, x0: T, y0: T, w: T, h: T, depth: usize) -> T {
        let parts = 1usize << depth;
        let pf = T::of_usize(parts);
        let dx = w / pf;
        let dy = h / pf;
        let half = T::of(0.5);
        let mut acc = T::zero();
        for a in 0..parts {
            let x = x0 + dx * (T::of_usize(a) + half);
            for b in 0..parts {
                let y = y0 + dy * (T::of_usize(b) + half);
                acc += self.at(x, y);
            }
        }
        acc / T::of_usize(parts * parts)
    }
}

impl<T: Real> Graphon<T> for AnalyticGraphon<T> {
    fn discretize(&self, m: usize, n: usize) -> Result<DenseMatrix<T>> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput("discretization needs m, n >= 1".into()));
        }
        let w = T::one() / T::of_usize(m);
        let h = T::one() / T::of_usize(n);
        let tol = T::of(QUADRATURE_REL_TOL);
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            let x0 = w * T::of_usize(i);
            for j in 0..n {
                let y0 = h * T::of_usize(j);
                let mut prev = self.cell_mean(x0, y0, w, h, 0);
                let mut converged = false;
                let mut gap = T::zero();
                for depth in 1..=self.max_depth {
                    let cur = self.cell_mean(x0, y0, w, h, depth);
                    gap = (cur - prev).abs();
                    prev = cur;
                    if gap <= tol * T::one().max(cur.abs()) {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(Error::QuadratureNonConvergence {
                        residual: gap.as_f64(),
                        depth: self.max_depth,
                    });
                }
                data.push(prev);
            }
        }
        DenseMatrix::from_vec(m, n, data)
    }

    fn zero_measure(&self, eta: T) -> Result<T> {
        let cells = 1usize << self.max_depth.min(MAX_MEASURE_EXP);
        let step = T::one() / T::of_usize(cells);
        let half = T::of(0.5);
        let mut hits = 0usize;
        for i in 0..cells {
            let x = step * (T::of_usize(i) + half);
            for j in 0..cells {
                let y = step * (T::of_usize(j) + half);
                if self.at(x, y) <= eta {
                    hits += 1;
                }
            }
        }
        Ok(T::of_usize(hits) / T::of_usize(cells * cells))
    }

    fn measure_resolution(&self) -> Option<f64> {
        Some(1.0 / (1usize << self.max_depth.min(MAX_MEASURE_EXP)) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn product_kernel_discretizes_to_known_values() {
        // W(x,y) = xy at 2x2: cell means are (2i+1)(2j+1)/16.
        let w = AnalyticGraphon::with_default_depth(|x: f64, y: f64| x * y);
        let d = w.discretize(2, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = ((2 * i + 1) * (2 * j + 1)) as f64 / 16.0;
                assert_abs_diff_eq!(d.get(i, j), expect, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn smooth_kernel_matches_closed_form_integral() {
        // W(x,y) = sin(pi x) sin(pi y) at 8x8; the (0,0) cell mean is
        // 64 * ((1 - cos(pi/8)) / pi)^2 in closed form.
        let pi = std::f64::consts::PI;
        let w = AnalyticGraphon::with_default_depth(move |x: f64, y: f64| {
            (pi * x).sin() * (pi * y).sin()
        });
        let d = w.discretize(8, 8).unwrap();
        let expect = 64.0 * ((1.0 - (pi / 8.0).cos()) / pi).powi(2);
        assert_abs_diff_eq!(d.get(0, 0), expect, epsilon = 1e-7);
    }

    #[test]
    fn non_convergent_evaluator_reports_residual() {
        // A kernel that looks different at every dyadic depth: high-frequency
        // oscillation tied to the sampling pattern defeats the midpoint rule
        // within a depth budget of 3.
        let w = AnalyticGraphon::new(3, |x: f64, y: f64| {
            (0.5 + 0.5 * (1000.0 * x * y).sin()).fract()
        })
        .unwrap();
        match w.discretize(1, 1) {
            Err(Error::QuadratureNonConvergence { depth, .. }) => assert_eq!(depth, 3),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn zero_measure_of_half_plane_indicator() {
        let w = AnalyticGraphon::with_default_depth(|x: f64, _y: f64| {
            if x <= 0.5 {
                1.0
            } else {
                0.0
            }
        });
        let phi = w.zero_measure(0.0).unwrap();
        assert_abs_diff_eq!(phi, 0.5, epsilon = 1e-3);
        assert!(w.measure_resolution().is_some());
    }

    #[test]
    fn evaluator_outputs_are_clamped() {
        let w = AnalyticGraphon::with_default_depth(|_x: f64, _y: f64| 7.0);
        let d = w.discretize(2, 2).unwrap();
        assert_eq!(d.get(0, 0), 1.0);
    }
}
