//! Marginal probability models for the environmental variables.
//!
//! Mean wind speed follows a Weibull law truncated to the turbine's operating
//! band; significant wave height and peak period are lognormal. The three
//! marginals are treated as independent.

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma, gamma_lr};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{domain, Result};

/// A univariate distribution for one environmental variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// Weibull(scale, shape) conditioned on `lower <= x <= upper`.
    TruncatedWeibull {
        scale: f64,
        shape: f64,
        lower: f64,
        upper: f64,
    },
    /// `ln x ~ Normal(mu, sigma)`.
    Lognormal { mu: f64, sigma: f64 },
}

impl DistributionSpec {
    /// Mean wind speed at hub height, m/s.
    pub const WIND_SPEED: Self = Self::TruncatedWeibull {
        scale: 11.9799,
        shape: 2.8005,
        lower: 3.0,
        upper: 25.0,
    };

    /// Significant wave height, m.
    pub const WAVE_HEIGHT: Self = Self::Lognormal {
        mu: 0.4887,
        sigma: 0.4489,
    };

    /// Spectral peak period, s.
    pub const PEAK_PERIOD: Self = Self::Lognormal {
        mu: 2.0759,
        sigma: 0.1547,
    };

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::TruncatedWeibull {
                scale,
                shape,
                lower,
                upper,
            } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(domain(format!("weibull scale must be > 0, got {scale}")));
                }
                if !(shape > 0.0 && shape.is_finite()) {
                    return Err(domain(format!("weibull shape must be > 0, got {shape}")));
                }
                if !(lower >= 0.0 && lower < upper && upper.is_finite()) {
                    return Err(domain(format!(
                        "weibull truncation requires 0 <= lower < upper, got [{lower}, {upper}]"
                    )));
                }
            }
            Self::Lognormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(domain(format!("lognormal mu must be finite, got {mu}")));
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(domain(format!("lognormal sigma must be > 0, got {sigma}")));
                }
            }
        }
        Ok(())
    }

    /// Closed support `[lo, hi]`; the lognormal upper end is infinite.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::TruncatedWeibull { lower, upper, .. } => (lower, upper),
            Self::Lognormal { .. } => (0.0, f64::INFINITY),
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Self::TruncatedWeibull {
                scale,
                shape,
                lower,
                upper,
            } => {
                if x < lower || x > upper {
                    0.0
                } else {
                    let z = x / scale;
                    let kernel = shape / scale * z.powf(shape - 1.0) * (-z.powf(shape)).exp();
                    kernel / weibull_mass(scale, shape, lower, upper)
                }
            }
            Self::Lognormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let z = (x.ln() - mu) / sigma;
                    (-0.5 * z * z).exp() / (x * sigma * (2.0 * PI).sqrt())
                }
            }
        })
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Self::TruncatedWeibull {
                scale,
                shape,
                lower,
                upper,
            } => {
                if x <= lower {
                    0.0
                } else if x >= upper {
                    1.0
                } else {
                    let s_lo = weibull_survival(scale, shape, lower);
                    let s_hi = weibull_survival(scale, shape, upper);
                    let s_x = weibull_survival(scale, shape, x);
                    ((s_lo - s_x) / (s_lo - s_hi)).clamp(0.0, 1.0)
                }
            }
            Self::Lognormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    standard_normal_cdf((x.ln() - mu) / sigma)
                }
            }
        })
    }

    /// Quantile function. The lognormal maps `u = 0` to 0 and `u = 1` to +inf.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        self.validate()?;
        if !(0.0..=1.0).contains(&u) {
            return Err(domain(format!("probability must lie in [0, 1], got {u}")));
        }
        Ok(match *self {
            Self::TruncatedWeibull {
                scale,
                shape,
                lower,
                upper,
            } => {
                if u == 0.0 {
                    return Ok(lower);
                }
                if u == 1.0 {
                    return Ok(upper);
                }
                // Work with survival probabilities so the upper tail keeps precision.
                let s_lo = weibull_survival(scale, shape, lower);
                let s_hi = weibull_survival(scale, shape, upper);
                let s = s_lo - u * (s_lo - s_hi);
                let x = scale * (-s.ln()).powf(1.0 / shape);
                x.clamp(lower, upper)
            }
            Self::Lognormal { mu, sigma } => {
                if u == 0.0 {
                    0.0
                } else if u == 1.0 {
                    f64::INFINITY
                } else {
                    (mu + sigma * standard_normal_quantile(u)).exp()
                }
            }
        })
    }

    pub fn mean(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Self::TruncatedWeibull {
                scale,
                shape,
                lower,
                upper,
            } => {
                // E[X; L<X<U] = a * (gamma(1+1/b, (U/a)^b) - gamma(1+1/b, (L/a)^b))
                let s = 1.0 + 1.0 / shape;
                let lo = (lower / scale).powf(shape);
                let hi = (upper / scale).powf(shape);
                let partial = gamma(s) * (gamma_lr(s, hi) - gamma_lr(s, lo));
                scale * partial / weibull_mass(scale, shape, lower, upper)
            }
            Self::Lognormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
        })
    }

    pub fn variance(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Self::TruncatedWeibull {
                scale,
                shape,
                lower,
                upper,
            } => {
                let s = 1.0 + 2.0 / shape;
                let lo = (lower / scale).powf(shape);
                let hi = (upper / scale).powf(shape);
                let second = scale * scale * gamma(s) * (gamma_lr(s, hi) - gamma_lr(s, lo))
                    / weibull_mass(scale, shape, lower, upper);
                let m = self.mean()?;
                (second - m * m).max(0.0)
            }
            Self::Lognormal { mu, sigma } => {
                let s2 = sigma * sigma;
                (s2.exp() - 1.0) * (2.0 * mu + s2).exp()
            }
        })
    }

    /// Distance between the 25% and 75% quantiles.
    pub fn interquartile_range(&self) -> Result<f64> {
        Ok(self.inverse_cdf(0.75)? - self.inverse_cdf(0.25)?)
    }
}

fn weibull_survival(scale: f64, shape: f64, x: f64) -> f64 {
    (-(x / scale).powf(shape)).exp()
}

/// F_W(upper) - F_W(lower) for the untruncated Weibull.
fn weibull_mass(scale: f64, shape: f64, lower: f64, upper: f64) -> f64 {
    weibull_survival(scale, shape, lower) - weibull_survival(scale, shape, upper)
}

pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

pub fn standard_normal_quantile(p: f64) -> f64 {
    let z = -SQRT_2 * erfc_inv(2.0 * p);
    if !z.is_finite() {
        return z;
    }
    // One Halley step; erfc_inv alone is good to about 1e-10.
    let e = standard_normal_cdf(z) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * z * z).exp();
    z - u / (1.0 + 0.5 * z * u)
}
