//! Dense matrices, reveal masks, permutation pairs, norms, and the SVD.

mod matrix;
mod svd;

pub use matrix::{DenseMatrix, PermPair, RevealMask};
pub use svd::{nuclear_norm, operator_norm, reconstruction_error, svd, SvdFactors};
