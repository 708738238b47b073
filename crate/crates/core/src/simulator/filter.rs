use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Result};

/// A single structural mode: unit static gain, natural frequency and damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeParams {
    /// Natural frequency, Hz.
    pub frequency: f64,
    /// Damping ratio.
    pub damping: f64,
}

impl ModeParams {
    pub const fn new(frequency: f64, damping: f64) -> Self {
        Self {
            frequency,
            damping,
        }
    }

    pub fn validate(&self, dt: f64) -> Result<()> {
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(domain(format!(
                "mode frequency must be > 0, got {}",
                self.frequency
            )));
        }
        if !(self.damping > 0.0 && self.damping.is_finite()) {
            return Err(domain(format!(
                "mode damping must be > 0 for a stable filter, got {}",
                self.damping
            )));
        }
        if self.frequency >= 0.5 / dt {
            return Err(domain(format!(
                "mode frequency {} Hz is at or above the Nyquist frequency {} Hz",
                self.frequency,
                0.5 / dt
            )));
        }
        Ok(())
    }
}

/// Bilinear-transform discretization of `w^2 / (s^2 + 2 z w s + w^2)`,
/// prewarped at the natural frequency.
#[derive(Debug, Clone, Copy)]
pub struct SecondOrderFilter {
    b: [f64; 3],
    a: [f64; 2],
}

impl SecondOrderFilter {
    pub fn new(mode: ModeParams, dt: f64) -> Result<Self> {
        mode.validate(dt)?;
        let w = 2.0 * PI * mode.frequency;
        let k = w / (w * dt / 2.0).tan();
        let zeta = mode.damping;
        let a0 = k * k + 2.0 * zeta * w * k + w * w;
        let a1 = 2.0 * (w * w - k * k);
        let a2 = k * k - 2.0 * zeta * w * k + w * w;
        let g = w * w / a0;
        Ok(Self {
            b: [g, 2.0 * g, g],
            a: [a1 / a0, a2 / a0],
        })
    }

    /// Filters `input`, starting from the steady state of its first sample.
    pub fn apply(&self, input: &[f64]) -> Vec<f64> {
        let Some(&u0) = input.first() else {
            return Vec::new();
        };
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let mut s2 = (b2 - a2) * u0;
        let mut s1 = (b1 - a1) * u0 + s2;
        input
            .iter()
            .map(|&u| {
                let y = b0 * u + s1;
                s1 = b1 * u - a1 * y + s2;
                s2 = b2 * u - a2 * y;
                y
            })
            .collect()
    }
}
