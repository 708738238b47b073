//! Three-point rainflow counting with residual half cycles.
//!
//! Rules, applied to the turning-point sequence as it is read:
//!
//! 1. With at least three points held, let X be the range of the two most
//!    recent points and Y the range of the two before it.
//! 2. If X < Y, read the next point.
//! 3. If Y contains the starting point, count Y as a half cycle, drop its
//!    first point (the next point becomes the start) and go to 1.
//! 4. Otherwise count Y as a full cycle, drop both of its points and go to 1.
//! 5. When the history ends, every remaining adjacent pair is a half cycle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressCycle {
    /// Peak-to-valley range, Pa.
    pub range: f64,
    /// Pa.
    pub mean: f64,
    /// 0.5 or 1.0.
    pub count: f64,
}

impl StressCycle {
    fn between(a: f64, b: f64, count: f64) -> Self {
        Self {
            range: (b - a).abs(),
            mean: (a + b) / 2.0,
            count,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.range >= 0.0 && self.range.is_finite() && self.mean.is_finite() && (self.count == 0.5 || self.count == 1.0)
    }
}

/// Local extrema of `series`, keeping both end points and collapsing plateaus.
pub fn turning_points(series: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &x in series {
        match out.len() {
            0 => out.push(x),
            1 => {
                if x != out[0] {
                    out.push(x);
                }
            }
            n => {
                let (a, b) = (out[n - 2], out[n - 1]);
                if x == b {
                    continue;
                }
                if (b - a) * (x - b) > 0.0 {
                    // Still moving the same way: extend the current excursion.
                    out[n - 1] = x;
                } else {
                    out.push(x);
                }
            }
        }
    }
    if out.len() == 1 {
        out.clear();
    }
    out
}

/// Counts cycles in a sequence that already consists of turning points.
pub fn count_reversals(reversals: &[f64]) -> Vec<StressCycle> {
    let mut cycles = Vec::new();
    let mut stack: Vec<f64> = Vec::with_capacity(reversals.len());
    for &r in reversals {
        stack.push(r);
        while stack.len() >= 3 {
            let n = stack.len();
            let x = (stack[n - 1] - stack[n - 2]).abs();
            let y = (stack[n - 2] - stack[n - 3]).abs();
            if x < y {
                break;
            }
            if n == 3 {
                cycles.push(StressCycle::between(stack[0], stack[1], 0.5));
                stack.remove(0);
            } else {
                cycles.push(StressCycle::between(stack[n - 3], stack[n - 2], 1.0));
                stack.drain(n - 3..n - 1);
            }
        }
    }
    cycles.extend(stack.windows(2).map(|w| StressCycle::between(w[0], w[1], 0.5)));
    cycles
}

/// Rainflow cycles of a stress history. A constant history has none.
pub fn rainflow(series: &[f64]) -> Result<Vec<StressCycle>> {
    if series.len() < 2 {
        return Err(Error::Empty(format!(
            "rainflow needs at least 2 samples, got {}",
            series.len()
        )));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(crate::error::domain("stress history contains non-finite samples"));
    }
    Ok(count_reversals(&turning_points(series)))
}

/// Fixed-width range histogram `(lower, upper, cycles)`, for reporting.
pub fn range_histogram(cycles: &[StressCycle], bins: usize) -> Vec<(f64, f64, f64)> {
    let max = cycles.iter().fold(0.0f64, |m, c| m.max(c.range));
    if bins == 0 || max == 0.0 {
        return Vec::new();
    }
    let width = max / bins as f64;
    let mut counts = vec![0.0; bins];
    for c in cycles {
        let i = ((c.range / width) as usize).min(bins - 1);
        counts[i] += c.count;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, n)| (i as f64 * width, (i + 1) as f64 * width, n))
        .collect()
}
