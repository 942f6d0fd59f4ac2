//! Cut norms and cut distances for dense matrices.
//!
//! The cut norm used throughout is
//! `||A||_cut = max { |x^T A y| : ||x||_inf <= 1, ||y||_inf <= 1 } / (m n)`,
//! whose maximum is always attained at sign vectors because the objective
//! is bilinear. The cut distance minimizes the cut norm of the difference
//! over simultaneous row and column relabellings.

mod distance;
mod norm;

pub use distance::{
    cut_distance_exact, cut_distance_heuristic, cut_distance_to_graphon, CutDistanceBound,
    EXACT_PERM_LIMIT,
};
pub use norm::{cut_norm_exact, cut_norm_lower, cut_norm_upper, CutNormEstimate, EXACT_DIM_LIMIT};
