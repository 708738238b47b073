//! Longitudinal turbulence at hub height from the Kaimal spectrum.

use rand::Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::spectral::{harmonic_bins, synthesize};
use crate::error::{domain, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindModel {
    /// IEC reference turbulence intensity (class B = 0.14).
    pub reference_intensity: f64,
    /// Kaimal integral length scale, m (8.1 x 42 m above 60 m hub height).
    pub integral_scale: f64,
}

impl Default for WindModel {
    fn default() -> Self {
        Self {
            reference_intensity: 0.14,
            integral_scale: 340.2,
        }
    }
}

impl WindModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.reference_intensity >= 0.0 && self.reference_intensity.is_finite()) {
            return Err(domain("reference turbulence intensity must be >= 0"));
        }
        if !(self.integral_scale > 0.0 && self.integral_scale.is_finite()) {
            return Err(domain("integral length scale must be > 0"));
        }
        Ok(())
    }

    /// Normal turbulence model standard deviation, m/s.
    pub fn sigma(&self, v_w: f64) -> f64 {
        self.reference_intensity * (0.75 * v_w + 5.6)
    }

    /// One-sided Kaimal PSD, (m/s)^2/Hz.
    pub fn kaimal_psd(&self, v_w: f64, f: f64) -> f64 {
        let s = self.sigma(v_w);
        let tl = self.integral_scale / v_w;
        4.0 * s * s * tl / (1.0 + 6.0 * f * tl).powf(5.0 / 3.0)
    }
}

/// Wind speed series of `round(duration / dt)` samples with mean `v_w`.
/// Harmonic amplitudes are deterministic, phases i.i.d. uniform.
pub fn synthesize_wind(
    v_w: f64,
    duration: f64,
    dt: f64,
    seed: u64,
    model: &WindModel,
    band: (f64, f64),
) -> Result<Vec<f64>> {
    model.validate()?;
    if !(v_w >= band.0 && v_w <= band.1) {
        return Err(crate::Error::OutOfBand(v_w, band.0, band.1));
    }
    let n = super::step_count(duration, dt)?;
    let df = 1.0 / (n as f64 * dt);
    let mut rng = seed::rng(seed);
    let coeffs: Vec<Complex64> = harmonic_bins(n, dt)
        .map(|(_, f)| {
            let amp = (2.0 * model.kaimal_psd(v_w, f) * df).sqrt();
            let phase = rng.random::<f64>() * 2.0 * PI;
            Complex64::from_polar(amp, phase)
        })
        .collect();
    if model.reference_intensity == 0.0 {
        return Ok(vec![v_w; n]);
    }
    Ok(synthesize(n, &coeffs)
        .into_iter()
        .map(|x| v_w + x)
        .collect())
}
