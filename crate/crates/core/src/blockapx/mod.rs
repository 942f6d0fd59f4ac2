//! Block (step-matrix) approximation machinery: partitions and averaging,
//! the joint two-matrix block approximation, residual transfer bounds, and
//! the spectral refinement sequence.

mod approx_pair;
mod partition;
mod refine;

pub use approx_pair::{block_approximate_pair, ApproxParams, BlockApproxResult};
pub use partition::{block_average, max_block_deviation, Partition, PartitionPair};
pub use refine::{
    block_transfer_bound, limit_estimate, refinement_sequence, BoundStatus, RefinementLevel,
    RefinementSequence, TransferBound, MAX_REFINE_LEVEL,
};
