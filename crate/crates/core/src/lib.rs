//! Deterministic laboratory for low-rank matrix completion under fixed
//! reveal patterns.
//!
//! The crate provides, generically over the floating-point scalar:
//!
//! - dense matrices, reveal masks, permutation pairs, and a hand-rolled
//!   one-sided Jacobi SVD ([`matcore`]);
//! - cut norms with certified lower/upper bounds and cut distances under
//!   row/column relabelling ([`cutmetric`]);
//! - measurable kernels ("graphons") on the unit square, their
//!   discretizations, structured mask generators, and the zero-measure
//!   recoverability diagnostic ([`graphon`]);
//! - block (step-matrix) approximation machinery: partitions, averaging,
//!   a simultaneous two-matrix block approximation, transfer bounds, and
//!   spectral refinement sequences ([`blockapx`]);
//! - box-constrained nuclear-norm minimization for completion from
//!   revealed entries via an operator-splitting solver ([`nucmin`]);
//! - plain-text matrix/mask/kernel file formats ([`io`]).
//!
//! Algorithms are deterministic: identical inputs (and seeds, where a
//! seed is part of the input) produce identical outputs, independent of
//! thread scheduling.
//!
//! The type aliases at the crate root fix the scalar to `f64`, the
//! recommended default.

pub mod blockapx;
pub mod cutmetric;
pub mod error;
pub mod graphon;
pub mod io;
pub mod matcore;
pub mod nucmin;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Dense `f64` matrix.
pub type Mat = matcore::DenseMatrix<f64>;
/// `f64` reveal mask.
pub type Mask = matcore::RevealMask<f64>;
/// `f64` SVD factors.
pub type Svd = matcore::SvdFactors<f64>;
/// `f64` cut-norm estimate.
pub type CutNorm = cutmetric::CutNormEstimate<f64>;
/// `f64` step kernel.
pub type StepKernel = graphon::StepGraphon<f64>;
/// `f64` completion solver configuration.
pub type SolverConfig = nucmin::SolverConfig<f64>;
/// `f64` completion result.
pub type Completion = nucmin::CompletionResult<f64>;
