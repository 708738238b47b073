//! Cycle counting and linear damage accumulation.

mod damage;
mod rainflow;

pub use damage::{
    cycles_to_failure, expected_cumulative_damage, goodman_correct, point_cumulative_damage,
    short_term_damage, years_to_seconds, DamageResult, Goodman, SnCurve, SECONDS_PER_YEAR,
};
pub use rainflow::{count_reversals, rainflow, range_histogram, turning_points, StressCycle};

use crate::error::Result;
use crate::stress::StressTimeSeries;

/// Rainflow, mean-stress correction and Miner sum for one stress history;
/// the window length is the history's duration.
pub fn stress_damage(stress: &StressTimeSeries, curve: &SnCurve, goodman: &Goodman) -> Result<DamageResult> {
    let cycles = rainflow(&stress.samples)?;
    short_term_damage(&cycles, curve, goodman, stress.duration())
}
