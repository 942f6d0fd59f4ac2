//! Scalar abstraction for the whole crate.
//!
//! Every algorithm is generic over [`Real`], a small extension of
//! `num_traits::Float` adding the conversions and marker bounds the
//! numerics need. `f32` and `f64` are covered by the blanket impl; the
//! crate root exports `f64` aliases for the common types.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point scalar usable by all matrix and graphon routines.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant, panicking only for non-finite inputs
    /// that no caller supplies.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant must convert")
    }

    /// Converts a `usize` count into the scalar type.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize must convert to scalar")
    }

    /// Lossy view as `f64`, for reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}
