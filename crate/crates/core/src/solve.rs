//! Bisection with reporting-grid snapping, shared by the fraction solvers.
//!
//! Solvers report the smallest fraction on a planning grid that attains the
//! target, because allocation fractions are enrollment targets: the exact
//! root is kept alongside for callers that need it.

use crate::error::{Error, Result};

pub(crate) struct GridSolution {
    /// Smallest grid fraction attaining the target (falls back to the raw
    /// root when no grid point in range attains it, e.g. target == maximum).
    pub fraction: f64,
    /// Unsnapped bisection root.
    pub raw_root: f64,
    /// Value of the objective at `fraction`.
    pub achieved: f64,
}

const BRACKET_TOL: f64 = 1e-7;
const SNAP_SLACK: f64 = 1e-6;

/// Solve `objective(f) >= target` for an increasing objective on [lo, hi],
/// reporting on the given grid.
pub(crate) fn solve_fraction_on_grid(
    objective: &dyn Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    target: f64,
    grid: f64,
) -> Result<GridSolution> {
    debug_assert!(lo < hi && grid > 0.0);
    let at_hi = objective(hi)?;
    if at_hi < target {
        return Err(Error::Unattainable { supremum: at_hi });
    }
    let at_lo = objective(lo)?;
    let raw_root = if at_lo >= target {
        lo
    } else {
        let mut a = lo;
        let mut b = hi;
        while b - a > BRACKET_TOL {
            let mid = 0.5 * (a + b);
            if objective(mid)? >= target {
                b = mid;
            } else {
                a = mid;
            }
        }
        b
    };
    let snapped = ((raw_root - SNAP_SLACK) / grid).ceil() * grid;
    if snapped <= hi + SNAP_SLACK {
        let snapped = snapped.min(hi);
        let achieved = objective(snapped)?;
        if achieved + 1e-9 >= target {
            return Ok(GridSolution {
                fraction: snapped,
                raw_root,
                achieved,
            });
        }
    }
    // No grid point in range attains the target (the root sits at or beyond
    // the last grid point, e.g. solving for the exact maximizer).
    let achieved = objective(raw_root)?;
    Ok(GridSolution {
        fraction: raw_root,
        raw_root,
        achieved,
    })
}
