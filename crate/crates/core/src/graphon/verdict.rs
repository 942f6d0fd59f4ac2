//! Recoverability diagnostic: the sublevel measure `phi` and the verdict
//! that a kernel admits stable recovery iff it is nonzero almost everywhere.

use crate::error::{Error, Result};
use crate::graphon::Graphon;
use crate::scalar::Real;

/// Default probe points for `phi`.
pub const DEFAULT_ETA_GRID: [f64; 4] = [0.0, 1e-4, 1e-3, 1e-2];

/// Sublevel-measure profile of a kernel together with the recovery verdict.
#[derive(Debug, Clone)]
pub struct ZeroMeasureReport<T: Real> {
    /// Probed thresholds, ascending, starting at 0.
    pub eta_grid: Vec<T>,
    /// `phi(eta)` per threshold; non-decreasing.
    pub phi: Vec<T>,
    /// True iff `phi(0) = 0` at the available resolution.
    pub admits_recovery: bool,
    /// Sampling cell side when `phi` was estimated on a grid, `None` when
    /// computed exactly. A `Some` value means the verdict is only as sharp
    /// as this resolution.
    pub resolution_warning: Option<f64>,
}

/// Evaluates `phi` on `eta_grid` (default `{0, 1e-4, 1e-3, 1e-2}`) and
/// declares the kernel recoverable iff `phi(0) = 0`.
///
/// The grid must contain 0; it is sorted internally.
pub fn recovery_verdict<T: Real, W: Graphon<T>>(
    kernel: &W,
    eta_grid: Option<&[T]>,
) -> Result<ZeroMeasureReport<T>> {
    let mut grid: Vec<T> = match eta_grid {
        Some(g) if !g.is_empty() => g.to_vec(),
        _ => DEFAULT_ETA_GRID.iter().map(|&e| T::of(e)).collect(),
    };
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite thresholds"));
    if grid[0] != T::zero() {
        return Err(Error::InvalidInput(
            "eta grid must contain 0 (the verdict threshold)".into(),
        ));
    }
    if grid.iter().any(|&e| e < T::zero()) {
        return Err(Error::InvalidInput("eta thresholds must be >= 0".into()));
    }

    let mut phi = Vec::with_capacity(grid.len());
    for &eta in &grid {
        phi.push(kernel.zero_measure(eta)?);
    }
    let admits_recovery = phi[0] == T::zero();
    Ok(ZeroMeasureReport {
        eta_grid: grid,
        phi,
        admits_recovery,
        resolution_warning: kernel.measure_resolution(),
    })
}
