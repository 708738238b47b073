//! Direct probability integration over a representative point set.
//!
//! A response evaluated at weighted points `(g_q, P_q)` yields a density by
//! replacing each Dirac delta with a Gaussian kernel of width `sigma`:
//!
//! ```text
//! p(y) = sum_q P_q / (sqrt(2 pi) sigma) * exp(-(y - g_q)^2 / (2 sigma^2))
//! ```
//!
//! Reliability skips the smoothing entirely: with the performance function
//! `Z_q = B - D_q(T)`, `R(T) = sum_q H(Z_q) P_q`, where `H(0)` counts as
//! failure.

use log::warn;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::fatigue::years_to_seconds;

/// Scalar response values at weighted points.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseEnsemble {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
    pub label: String,
}

impl ResponseEnsemble {
    pub fn new(values: Vec<f64>, probs: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("response ensemble".into()));
        }
        if values.len() != probs.len() {
            return Err(Error::LengthMismatch {
                what: "response values vs probabilities",
                left: values.len(),
                right: probs.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("response values must be finite"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(domain("probabilities must be finite and nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(Self {
            values,
            probs,
            label: label.into(),
        })
    }

    /// Equal weights `1 / n`, as for plain Monte Carlo samples.
    pub fn equally_weighted(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let n = values.len();
        let probs = vec![1.0 / n.max(1) as f64; n];
        // 1/n summed n times can miss 1 by a few ulps; renormalize on the last entry.
        let mut probs = probs;
        if n > 0 {
            let head: f64 = probs[..n - 1].iter().sum();
            probs[n - 1] = 1.0 - head;
        }
        Self::new(values, probs, label)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| v * p).sum()
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        self.values
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| p * (v - m) * (v - m))
            .sum::<f64>()
            .sqrt()
    }

    fn range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Weighted empirical CDF, `P(Y <= y)`.
    pub fn ecdf(&self, y: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.probs)
            .filter(|(v, _)| **v <= y)
            .map(|(_, p)| p)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// `1.06 s_w N^(-1/5)` with the probability-weighted standard deviation.
    Silverman,
    Fixed(f64),
}

impl Default for Bandwidth {
    fn default() -> Self {
        Self::Silverman
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Minimum number of grid points.
    pub points: usize,
    /// Padding beyond the value range, in bandwidths.
    pub pad: f64,
    /// Largest allowed spacing, in bandwidths; the grid is refined to honour it.
    pub max_spacing: f64,
    /// Explicit `[lo, hi]`; overrides the padded value range.
    pub span: Option<(f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 1024,
            pad: 6.0,
            max_spacing: 0.5,
            span: None,
        }
    }
}

const MAX_GRID: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct PdfEstimate {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl PdfEstimate {
    /// Trapezoidal integral of the density over the grid.
    pub fn integral(&self) -> f64 {
        *self.cdf().last().unwrap_or(&0.0)
    }

    /// Cumulative trapezoidal integral, starting at 0 on the first grid point.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.grid.len());
        out.push(0.0);
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.density[i] + self.density[i - 1]) * (self.grid[i] - self.grid[i - 1]);
            out.push(acc);
        }
        out
    }
}

pub fn silverman_bandwidth(ensemble: &ResponseEnsemble) -> f64 {
    1.06 * ensemble.std_dev() * (ensemble.len() as f64).powf(-0.2)
}

/// Smoothed-delta density of an ensemble on a uniform grid.
pub fn estimate_pdf(ensemble: &ResponseEnsemble, grid: &GridSpec, bandwidth: Bandwidth) -> Result<PdfEstimate> {
    let sigma = match bandwidth {
        Bandwidth::Fixed(s) => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(domain(format!("bandwidth must be > 0, got {s}")));
            }
            s
        }
        Bandwidth::Silverman => {
            let s = silverman_bandwidth(ensemble);
            if s > 0.0 {
                s
            } else {
                let scale = ensemble.values[0].abs().max(f64::MIN_POSITIVE.sqrt());
                warn!(
                    "all {} response values are identical; using a near-delta bandwidth",
                    ensemble.label
                );
                1e-6 * scale
            }
        }
    };
    let (lo, hi) = match grid.span {
        Some((lo, hi)) => {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return Err(domain(format!("grid span [{lo}, {hi}] is empty")));
            }
            (lo, hi)
        }
        None => {
            let (vmin, vmax) = ensemble.range();
            (vmin - grid.pad * sigma, vmax + grid.pad * sigma)
        }
    };
    if grid.points < 2 || !(grid.max_spacing > 0.0) {
        return Err(domain("grid needs at least 2 points and a positive spacing limit"));
    }
    let needed = ((hi - lo) / (grid.max_spacing * sigma)).ceil() as usize + 1;
    let n = grid.points.max(needed);
    if n > MAX_GRID {
        return Err(domain(format!(
            "grid of {n} points needed to resolve bandwidth {sigma}; widen the bandwidth or narrow the span"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let ys: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    let norm = 1.0 / ((2.0 * PI).sqrt() * sigma);
    let inv = 1.0 / (2.0 * sigma * sigma);
    let reach = 40.0 * sigma * sigma;
    let density = ys
        .iter()
        .map(|&y| {
            ensemble
                .values
                .iter()
                .zip(&ensemble.probs)
                .map(|(&g, &p)| {
                    let d2 = (y - g) * (y - g);
                    if d2 > reach {
                        0.0
                    } else {
                        p * norm * (-d2 * inv).exp()
                    }
                })
                .sum()
        })
        .collect();
    Ok(PdfEstimate {
        grid: ys,
        density,
        bandwidth: sigma,
    })
}

/// Largest absolute gap between the CDFs of two estimates on the same grid.
pub fn cdf_distance(a: &PdfEstimate, b: &PdfEstimate) -> Result<f64> {
    if a.grid != b.grid {
        return Err(domain("CDF comparison needs both estimates on the same grid"));
    }
    Ok(a.cdf()
        .iter()
        .zip(b.cdf())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
}

/// `Z_q = B - dr_q * T` with `T` in seconds.
pub fn performance_values(
    damage_rates: &[f64],
    probs: &[f64],
    t_operate: f64,
    threshold: f64,
) -> Result<ResponseEnsemble> {
    if !(t_operate >= 0.0) {
        return Err(domain(format!("operating time must be >= 0, got {t_operate}")));
    }
    let z = damage_rates.iter().map(|dr| threshold - dr * t_operate).collect();
    ResponseEnsemble::new(z, probs.to_vec(), "performance")
}

/// Probability mass of the safe set `Z > 0`.
pub fn reliability(z: &ResponseEnsemble) -> f64 {
    let r: f64 = z
        .values
        .iter()
        .zip(&z.probs)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, p)| p)
        .sum();
    r.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityCurve {
    pub years: Vec<f64>,
    pub reliability: Vec<f64>,
    pub threshold: f64,
}

pub fn reliability_curve(
    damage_rates: &[f64],
    probs: &[f64],
    years: &[f64],
    threshold: f64,
) -> Result<ReliabilityCurve> {
    check_times(years)?;
    let reliability = years
        .iter()
        .map(|&y| performance_values(damage_rates, probs, years_to_seconds(y), threshold).map(|z| reliability(&z)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReliabilityCurve {
        years: years.to_vec(),
        reliability,
        threshold,
    })
}

fn check_times(years: &[f64]) -> Result<()> {
    if years.iter().any(|y| !(*y >= 0.0 && y.is_finite())) {
        return Err(domain("operating times must be finite and >= 0"));
    }
    if years.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("operating times must be strictly ascending"));
    }
    Ok(())
}

/// Monte Carlo reliability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McsEstimate {
    pub reliability: f64,
    pub std_error: f64,
    pub samples: usize,
}

pub const MIN_MCS_SAMPLES: usize = 100;

pub fn mcs_reliability(damage_rates: &[f64], t_operate: f64, threshold: f64) -> Result<McsEstimate> {
    let n = damage_rates.len();
    if n < MIN_MCS_SAMPLES {
        return Err(domain(format!(
            "Monte Carlo reliability needs at least {MIN_MCS_SAMPLES} samples, got {n}"
        )));
    }
    let safe = damage_rates
        .iter()
        .filter(|dr| threshold - *dr * t_operate > 0.0)
        .count();
    let r = safe as f64 / n as f64;
    Ok(McsEstimate {
        reliability: r,
        std_error: (r * (1.0 - r) / n as f64).sqrt(),
        samples: n,
    })
}
