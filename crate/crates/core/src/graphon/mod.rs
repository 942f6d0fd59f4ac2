//! Graphons (kernels on the unit square), their discretizations, the
//! small-value measure diagnostic, and the reveal-pattern generators.

mod analytic;
mod generators;
mod step;
mod verdict;

pub use analytic::AnalyticGraphon;
pub use generators::{gen_half_rows, gen_parity, gen_quasirandom, parity_block_perm};
pub use step::StepGraphon;
pub use verdict::{recovery_verdict, ZeroMeasureReport, DEFAULT_ETA_GRID};

use crate::error::Result;
use crate::matcore::DenseMatrix;
use crate::scalar::Real;

/// A measurable kernel `W : [0,1]^2 -> [0,1]` that can be discretized and
/// whose sublevel sets can be measured.
pub trait Graphon<T: Real> {
    /// The m-by-n discretization whose `(i,j)` entry is `m*n` times the
    /// integral of `W` over the cell `[i/m,(i+1)/m] x [j/n,(j+1)/n]`.
    fn discretize(&self, m: usize, n: usize) -> Result<DenseMatrix<T>>;

    /// `phi(eta)`: the Lebesgue measure of `{(x,y) : W(x,y) <= eta}`.
    fn zero_measure(&self, eta: T) -> Result<T>;

    /// Side length of the sampling cell when the measure is estimated on a
    /// grid; `None` when it is computed exactly.
    fn measure_resolution(&self) -> Option<f64>;
}
