//! Long-crested irregular waves from a JONSWAP spectrum.

use rand::Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::spectral::{harmonic_bins, synthesize};
use crate::error::{domain, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveModel {
    /// JONSWAP peak enhancement factor.
    pub peak_enhancement: f64,
    /// Spar column diameter at the waterline, m.
    pub spar_diameter: f64,
    /// Morison inertia coefficient C_M.
    pub inertia_coefficient: f64,
    /// Sea water density, kg/m^3.
    pub water_density: f64,
    pub gravity: f64,
    /// Effective lever arm turning the horizontal wave force into a
    /// tower-base overturning moment, m. The default of 3 m is calibrated so
    /// that wave loading gives the tower a realistic share of its damage.
    pub moment_arm: f64,
    /// Tower-top acceleration per newton of horizontal wave force, m/s^2/N.
    pub tower_top_accel_per_newton: f64,
    /// Fraction of the platform heave force carried through the tower base.
    pub heave_transfer: f64,
}

impl Default for WaveModel {
    fn default() -> Self {
        Self {
            peak_enhancement: 3.3,
            spar_diameter: 9.4,
            inertia_coefficient: 2.0,
            water_density: 1025.0,
            gravity: 9.80665,
            moment_arm: 3.0,
            tower_top_accel_per_newton: 5.0e-7,
            heave_transfer: 0.075,
        }
    }
}

impl WaveModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("peak_enhancement", self.peak_enhancement),
            ("spar_diameter", self.spar_diameter),
            ("inertia_coefficient", self.inertia_coefficient),
            ("water_density", self.water_density),
            ("gravity", self.gravity),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("wave model {name} must be > 0, got {v}")));
            }
        }
        let nonneg = [
            ("moment_arm", self.moment_arm),
            ("tower_top_accel_per_newton", self.tower_top_accel_per_newton),
            ("heave_transfer", self.heave_transfer),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(domain(format!("wave model {name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// JONSWAP shape (unnormalized), per Hz.
    pub fn jonswap_shape(&self, t_p: f64, f: f64) -> f64 {
        let fp = 1.0 / t_p;
        let width = if f <= fp { 0.07 } else { 0.09 };
        let r = (-(f - fp).powi(2) / (2.0 * width * width * fp * fp)).exp();
        f.powi(-5) * (-1.25 * (fp / f).powi(4)).exp() * self.peak_enhancement.powf(r)
    }

    fn wavenumber(&self, f: f64) -> f64 {
        let w = 2.0 * PI * f;
        w * w / self.gravity
    }

    fn waterplane_area(&self) -> f64 {
        0.25 * PI * self.spar_diameter * self.spar_diameter
    }

    /// Horizontal inertia force per metre of elevation amplitude, integrated
    /// over the draft with deep-water decay. Phase leads elevation by 90 deg.
    pub fn inertia_transfer(&self, f: f64, draft: f64) -> Complex64 {
        let w = 2.0 * PI * f;
        let k = self.wavenumber(f);
        let depth = (1.0 - (-k * draft).exp()) / k;
        let mag = self.water_density * self.inertia_coefficient * self.waterplane_area() * w * w * depth;
        Complex64::new(0.0, mag)
    }

    /// Vertical Froude-Krylov force on the keel per metre of elevation amplitude.
    pub fn heave_transfer_fn(&self, f: f64, draft: f64) -> Complex64 {
        let k = self.wavenumber(f);
        let mag = self.water_density * self.gravity * self.waterplane_area() * (-k * draft).exp();
        Complex64::new(mag, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveHarmonic {
    /// Elevation amplitude, m.
    pub amplitude: f64,
    /// Hz.
    pub frequency: f64,
    /// rad.
    pub phase: f64,
}

impl WaveHarmonic {
    pub fn phasor(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

#[derive(Debug, Clone)]
pub struct WaveField {
    pub elevation: Vec<f64>,
    pub harmonics: Vec<WaveHarmonic>,
    /// Propagation direction, degrees from +X toward +Y.
    pub heading_deg: f64,
}

/// `(cos, sin)` of a heading in degrees, exact at multiples of 90.
pub fn heading_components(beta_deg: f64) -> (f64, f64) {
    let quarter = beta_deg / 90.0;
    if quarter.fract() == 0.0 {
        match (quarter as i64).rem_euclid(4) {
            0 => return (1.0, 0.0),
            1 => return (0.0, 1.0),
            2 => return (-1.0, 0.0),
            _ => return (0.0, -1.0),
        }
    }
    let r = beta_deg.to_radians();
    (r.cos(), r.sin())
}

/// Irregular sea of `round(duration / dt)` samples. The harmonic amplitudes
/// are scaled so the zeroth spectral moment equals `(h_s / 4)^2` exactly.
pub fn synthesize_waves(
    h_s: f64,
    t_p: f64,
    beta_deg: f64,
    duration: f64,
    dt: f64,
    seed: u64,
    model: &WaveModel,
) -> Result<WaveField> {
    model.validate()?;
    if !(h_s >= 0.0 && h_s.is_finite()) {
        return Err(domain(format!("significant wave height must be >= 0, got {h_s}")));
    }
    if !(t_p > 0.0 && t_p.is_finite()) {
        return Err(domain(format!("peak period must be > 0, got {t_p}")));
    }
    if !(0.0..=90.0).contains(&beta_deg) {
        return Err(domain(format!("wave heading must lie in [0, 90] deg, got {beta_deg}")));
    }
    let n = super::step_count(duration, dt)?;
    let df = 1.0 / (n as f64 * dt);
    let mut rng = seed::rng(seed);
    let mut harmonics: Vec<WaveHarmonic> = harmonic_bins(n, dt)
        .map(|(_, f)| WaveHarmonic {
            amplitude: (2.0 * model.jonswap_shape(t_p, f) * df).sqrt(),
            frequency: f,
            phase: rng.random::<f64>() * 2.0 * PI,
        })
        .collect();
    let m0: f64 = harmonics.iter().map(|h| 0.5 * h.amplitude * h.amplitude).sum();
    if !(m0 > 0.0 && m0.is_finite()) {
        return Err(domain(format!(
            "peak period {t_p} s leaves no spectral energy in the resolvable band"
        )));
    }
    let scale = 0.25 * h_s / m0.sqrt();
    for h in &mut harmonics {
        h.amplitude *= scale;
    }
    let coeffs: Vec<Complex64> = harmonics.iter().map(WaveHarmonic::phasor).collect();
    Ok(WaveField {
        elevation: synthesize(n, &coeffs),
        harmonics,
        heading_deg: beta_deg,
    })
}
