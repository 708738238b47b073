use serde::{Deserialize, Serialize};

use super::rainflow::StressCycle;
use crate::error::{domain, Error, Result};

/// Seconds in one operating year (365.25 days of continuous operation).
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

pub fn years_to_seconds(years: f64) -> f64 {
    years * SECONDS_PER_YEAR
}

/// Single-slope S-N curve `lg N = lg a - m lg(delta_sigma / unit)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnCurve {
    /// lg of the intercept, with stress in `stress_unit`.
    pub log_a: f64,
    pub slope: f64,
    /// Ultimate strength for the mean-stress correction, Pa.
    pub ultimate: f64,
    /// Pa per curve stress unit (1e6 for curves tabulated in MPa).
    #[serde(default = "mpa")]
    pub stress_unit: f64,
}

fn mpa() -> f64 {
    1.0e6
}

impl SnCurve {
    /// Welded steel in air, detail category D (lg a = 12.164, m = 3), with a
    /// 355 MPa strength placeholder.
    pub fn steel_tower() -> Self {
        Self {
            log_a: 12.164,
            slope: 3.0,
            ultimate: 355.0e6,
            stress_unit: 1.0e6,
        }
    }

    /// Glass-fibre composite blade root, m = 8. The intercept and strength
    /// are placeholders; log a = 16.25 is calibrated to give a blade-root
    /// reliability in the same range as the tower.
    pub fn composite_blade() -> Self {
        Self {
            log_a: 16.25,
            slope: 8.0,
            ultimate: 500.0e6,
            stress_unit: 1.0e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slope > 0.0 && self.slope.is_finite()) {
            return Err(domain(format!("S-N slope must be > 0, got {}", self.slope)));
        }
        if !(self.ultimate > 0.0 && self.ultimate.is_finite()) {
            return Err(domain(format!("ultimate strength must be > 0, got {}", self.ultimate)));
        }
        if !(self.stress_unit > 0.0 && self.stress_unit.is_finite() && self.log_a.is_finite()) {
            return Err(domain("S-N intercept and stress unit must be finite and positive"));
        }
        Ok(())
    }
}

/// Mean-stress correction settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Goodman {
    /// Reference mean stress the ranges are mapped to, Pa.
    pub fixed_mean: f64,
    pub exponent: f64,
}

impl Default for Goodman {
    fn default() -> Self {
        Self {
            fixed_mean: 0.0,
            exponent: 1.0,
        }
    }
}

/// Range equivalent to `cycle` at the fixed mean `fixed_mean`.
pub fn goodman_correct(cycle: &StressCycle, ultimate: f64, fixed_mean: f64, exponent: f64) -> Result<f64> {
    if cycle.mean.abs() >= ultimate {
        return Err(Error::Overload {
            mean: cycle.mean,
            ultimate,
        });
    }
    if exponent == 0.0 {
        return Ok(cycle.range);
    }
    let ratio = (ultimate - fixed_mean.abs()) / (ultimate - cycle.mean.abs());
    Ok(cycle.range * ratio.powf(exponent))
}

pub fn cycles_to_failure(delta_sigma: f64, curve: &SnCurve) -> Result<f64> {
    if !(delta_sigma > 0.0) {
        return Err(domain(format!("stress range must be > 0, got {delta_sigma}")));
    }
    let lg_n = curve.log_a - curve.slope * (delta_sigma / curve.stress_unit).log10();
    Ok(10f64.powf(lg_n))
}

/// Short-term damage over one simulated window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DamageResult {
    pub d_st: f64,
    /// Damage rate, 1/s.
    pub dr_st: f64,
    /// Window length, s.
    pub t_j: f64,
}

/// Miner sum over Goodman-corrected cycles, and the matching damage rate.
pub fn short_term_damage(
    cycles: &[StressCycle],
    curve: &SnCurve,
    goodman: &Goodman,
    t_j: f64,
) -> Result<DamageResult> {
    curve.validate()?;
    if !(t_j > 0.0 && t_j.is_finite()) {
        return Err(domain(format!("window length must be > 0, got {t_j}")));
    }
    let mut d_st = 0.0;
    for c in cycles {
        let corrected = goodman_correct(c, curve.ultimate, goodman.fixed_mean, goodman.exponent)?;
        if corrected > 0.0 {
            d_st += c.count / cycles_to_failure(corrected, curve)?;
        }
    }
    Ok(DamageResult {
        d_st,
        dr_st: d_st / t_j,
        t_j,
    })
}

/// Damage after `t_operate` seconds at a constant damage rate.
pub fn point_cumulative_damage(dr_st: f64, t_operate: f64) -> Result<f64> {
    if !(t_operate >= 0.0) {
        return Err(domain(format!("operating time must be >= 0, got {t_operate}")));
    }
    Ok(dr_st * t_operate)
}

/// Probability-weighted cumulative damage over representative points.
pub fn expected_cumulative_damage(rates: &[f64], probs: &[f64], t_operate: f64) -> Result<f64> {
    if rates.len() != probs.len() {
        return Err(Error::LengthMismatch {
            what: "damage rates vs probabilities",
            left: rates.len(),
            right: probs.len(),
        });
    }
    let mut total = 0.0;
    for (r, p) in rates.iter().zip(probs) {
        total += p * point_cumulative_damage(*r, t_operate)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(range: f64, mean: f64) -> StressCycle {
        StressCycle {
            range,
            mean,
            count: 1.0,
        }
    }

    #[test]
    fn goodman_identities() {
        assert_eq!(goodman_correct(&cycle(10.0, 0.0), 100.0, 0.0, 1.0).unwrap(), 10.0);
        assert_eq!(goodman_correct(&cycle(10.0, 50.0), 100.0, 0.0, 1.0).unwrap(), 20.0);
        assert_eq!(goodman_correct(&cycle(10.0, -50.0), 100.0, 0.0, 1.0).unwrap(), 20.0);
        assert_eq!(goodman_correct(&cycle(10.0, 73.0), 100.0, 0.0, 0.0).unwrap(), 10.0);
        assert!(matches!(
            goodman_correct(&cycle(10.0, 100.0), 100.0, 0.0, 1.0),
            Err(Error::Overload { .. })
        ));
    }

    #[test]
    fn sn_identities() {
        let c = SnCurve::steel_tower();
        let unit_life = 10f64.powf(c.log_a / c.slope) * c.stress_unit;
        assert!((cycles_to_failure(unit_life, &c).unwrap() - 1.0).abs() < 1e-9);
        let n1 = cycles_to_failure(80e6, &c).unwrap();
        let n2 = cycles_to_failure(40e6, &c).unwrap();
        assert!((n2 / n1 - 8.0).abs() < 1e-9);
        // 100 MPa on the tower curve: 10^(12.164 - 6)
        let n = cycles_to_failure(100e6, &c).unwrap();
        assert!((n / 1_458_814.260_275_347_4 - 1.0).abs() < 1e-12, "{n}");
        assert!(cycles_to_failure(0.0, &c).is_err());
    }

    #[test]
    fn empty_and_identical_cycles() {
        let c = SnCurve::steel_tower();
        let g = Goodman::default();
        assert_eq!(short_term_damage(&[], &c, &g, 600.0).unwrap().d_st, 0.0);
        let cycles = vec![cycle(50e6, 0.0); 25];
        let d = short_term_damage(&cycles, &c, &g, 600.0).unwrap();
        let expected = 25.0 / cycles_to_failure(50e6, &c).unwrap();
        assert!((d.d_st / expected - 1.0).abs() < 1e-12);
        assert_eq!(d.dr_st, d.d_st / 600.0);
    }

    #[test]
    fn cumulative_damage() {
        assert_eq!(point_cumulative_damage(1e-9, 0.0).unwrap(), 0.0);
        assert_eq!(point_cumulative_damage(1e-9, 2e8).unwrap(), 2.0 * point_cumulative_damage(1e-9, 1e8).unwrap());
        assert!(point_cumulative_damage(1e-9, -1.0).is_err());
        let t = years_to_seconds(20.0);
        assert_eq!(t, 631_152_000.0);
        assert_eq!(
            expected_cumulative_damage(&[2e-9], &[1.0], t).unwrap(),
            point_cumulative_damage(2e-9, t).unwrap()
        );
        let d = expected_cumulative_damage(&[1e-9, 3e-9], &[0.3, 0.7], t).unwrap();
        assert!((d - (0.3 * 1e-9 * t + 0.7 * 3e-9 * t)).abs() < 1e-15);
        let same = expected_cumulative_damage(&[4e-10; 3], &[0.2, 0.5, 0.3], t).unwrap();
        assert!((same - 4e-10 * t).abs() < 1e-15);
        assert!(expected_cumulative_damage(&[1e-9], &[0.5, 0.5], t).is_err());
    }
}
