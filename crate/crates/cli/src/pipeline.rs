//! Stage implementations shared by the subcommands.

use anyhow::{Context, Result};
use rayon::prelude::*;
use std::path::Path;

use fowt_dpim::analysis::{damage_from_loads, PointDamage};
use fowt_dpim::dpim::{
    cdf_distance, estimate_pdf, mcs_reliability, performance_values, reliability_curve, silverman_bandwidth,
    Bandwidth, GridSpec, PdfEstimate, ReliabilityCurve, ResponseEnsemble,
};
use fowt_dpim::fatigue::years_to_seconds;
use fowt_dpim::io::{write_loads, LoadMetadata};
use fowt_dpim::pointset::{generate_gf_points_with, sample_mcs, EnvironmentalPoint, RepresentativePointSet};
use fowt_dpim::seed::{self, Purpose};
use fowt_dpim::simulator::simulate;
use fowt_dpim::stress::TOWER_NODES;

use crate::config::RunConfig;

/// The two fatigue hot spots carried through the reliability stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hotspot {
    TowerNode7,
    BladeRoot,
}

impl Hotspot {
    pub const ALL: [Hotspot; 2] = [Hotspot::TowerNode7, Hotspot::BladeRoot];

    pub fn name(self) -> &'static str {
        match self {
            Hotspot::TowerNode7 => "tower_node7",
            Hotspot::BladeRoot => "blade_root",
        }
    }

    pub fn damage_rate(self, d: &PointDamage) -> f64 {
        match self {
            Hotspot::TowerNode7 => d.tower_node7().dr_st,
            Hotspot::BladeRoot => d.blade.dr_st,
        }
    }

    pub fn mean_stress(self, d: &PointDamage) -> f64 {
        match self {
            Hotspot::TowerNode7 => d.tower_mean_stress[TOWER_NODES - 1],
            Hotspot::BladeRoot => d.blade_mean_stress,
        }
    }
}

pub fn build_points(cfg: &RunConfig) -> Result<RepresentativePointSet> {
    generate_gf_points_with(&cfg.environment, cfg.points, cfg.seed, &cfg.point_set)
        .context("building the representative point set")
}

/// Which family of realization seeds a batch of simulations draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Batch {
    Representative,
    MonteCarlo,
}

impl Batch {
    fn purpose(self) -> Purpose {
        match self {
            Batch::Representative => Purpose::PointRealization,
            Batch::MonteCarlo => Purpose::SampleRealization,
        }
    }
}

pub fn realization_seed(cfg: &RunConfig, batch: Batch, index: usize, replicate: usize) -> u64 {
    seed::realization(cfg.seed, batch.purpose(), index as u64, replicate as u64)
}

pub fn loads_file_name(q: usize, replicate: usize) -> String {
    format!("q{q:05}_r{replicate}.csv")
}

/// Simulates every point (with `replicates` realizations each, point-major)
/// and reduces the loads to damage. Loads are written to `loads_dir` when set.
pub fn evaluate(
    cfg: &RunConfig,
    points: &[EnvironmentalPoint],
    heading: f64,
    batch: Batch,
    replicates: usize,
    loads_dir: Option<&Path>,
) -> Result<Vec<PointDamage>> {
    if let Some(dir) = loads_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    (0..points.len() * replicates)
        .into_par_iter()
        .map(|idx| {
            let (q, r) = (idx / replicates, idx % replicates);
            let s = realization_seed(cfg, batch, q, r);
            let sim = cfg.simulation.config(heading, s);
            let where_ = || format!("point {} (replicate {r}, heading {heading} deg)", q + 1);
            let loads = simulate(&points[q], &sim, &cfg.turbine)
                .with_context(|| format!("simulation failed at {}", where_()))?;
            if let Some(dir) = loads_dir {
                let path = dir.join(loads_file_name(q + 1, r));
                let meta = LoadMetadata {
                    point: points[q],
                    heading_deg: heading,
                    seed: s,
                    dt: sim.dt,
                };
                let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_loads(std::io::BufWriter::new(file), &meta, &loads)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            damage_from_loads(&loads, &cfg.turbine, &cfg.fatigue)
                .with_context(|| format!("fatigue evaluation failed at {}", where_()))
        })
        .collect()
}

/// Point probabilities spread evenly over each point's replicates.
pub fn replicate_probabilities(probs: &[f64], replicates: usize) -> Vec<f64> {
    let mut out: Vec<f64> = probs
        .iter()
        .flat_map(|p| std::iter::repeat_n(p / replicates as f64, replicates))
        .collect();
    // Keep the total at one to the last ulp.
    let total: f64 = out.iter().sum();
    if let Some(last) = out.last_mut() {
        *last += 1.0 - total;
        *last = last.max(0.0);
    }
    out
}

pub fn rates(damage: &[PointDamage], spot: Hotspot) -> Vec<f64> {
    damage.iter().map(|d| spot.damage_rate(d)).collect()
}

/// Probability-weighted mean stress at the seven tower nodes, then the blade root.
pub fn weighted_mean_stress(damage: &[PointDamage], probs: &[f64]) -> [f64; TOWER_NODES + 1] {
    let mut out = [0.0; TOWER_NODES + 1];
    for (d, p) in damage.iter().zip(probs) {
        for (o, s) in out.iter_mut().zip(d.tower_mean_stress.iter().chain([&d.blade_mean_stress])) {
            *o += p * s;
        }
    }
    out
}

pub struct DpimProducts {
    pub tower: ReliabilityCurve,
    pub blade: ReliabilityCurve,
    /// Density of cumulative damage per hot spot and reporting time.
    pub damage_pdfs: Vec<(Hotspot, f64, PdfEstimate)>,
    /// Density of the mean stress per hot spot, Pa.
    pub stress_pdfs: Vec<(Hotspot, PdfEstimate)>,
    pub mean_stress: [f64; TOWER_NODES + 1],
}

pub fn cumulative_damage(rates: &[f64], years: f64) -> Vec<f64> {
    let t = years_to_seconds(years);
    rates.iter().map(|r| r * t).collect()
}

pub fn dpim_products(cfg: &RunConfig, damage: &[PointDamage], probs: &[f64]) -> Result<DpimProducts> {
    let grid = cfg.dpim.grid;
    let bw = cfg.dpim.bandwidth;
    let curve = |spot: Hotspot| reliability_curve(&rates(damage, spot), probs, &cfg.years, cfg.threshold);
    let mut damage_pdfs = Vec::new();
    let mut stress_pdfs = Vec::new();
    for spot in Hotspot::ALL {
        let r = rates(damage, spot);
        for &y in &cfg.years {
            let e = ResponseEnsemble::new(cumulative_damage(&r, y), probs.to_vec(), spot.name())?;
            damage_pdfs.push((spot, y, estimate_pdf(&e, &grid, bw)?));
        }
        let s: Vec<f64> = damage.iter().map(|d| spot.mean_stress(d)).collect();
        let e = ResponseEnsemble::new(s, probs.to_vec(), spot.name())?;
        stress_pdfs.push((spot, estimate_pdf(&e, &grid, bw)?));
    }
    Ok(DpimProducts {
        tower: curve(Hotspot::TowerNode7)?,
        blade: curve(Hotspot::BladeRoot)?,
        damage_pdfs,
        stress_pdfs,
        mean_stress: weighted_mean_stress(damage, probs),
    })
}

pub fn mcs_samples(cfg: &RunConfig) -> Result<Vec<EnvironmentalPoint>> {
    sample_mcs(&cfg.environment, cfg.mcs_samples, cfg.seed).context("drawing Monte Carlo samples")
}

/// Agreement between the DPIM and Monte Carlo answers at one reporting time.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Consistency {
    pub hotspot: &'static str,
    pub years: f64,
    pub r_dpim: f64,
    pub r_mcs: f64,
    pub se_mcs: f64,
    /// `max(0.02, 3 se)`.
    pub tolerance: f64,
    /// Largest gap between the damage CDFs implied by the two densities.
    pub pdf_ks: f64,
}

impl Consistency {
    pub const KS_LIMIT: f64 = 0.05;

    pub fn reliability_ok(&self) -> bool {
        (self.r_dpim - self.r_mcs).abs() <= self.tolerance
    }

    pub fn pdf_ok(&self) -> bool {
        self.pdf_ks <= Self::KS_LIMIT
    }
}

/// Both densities are smoothed with the same kernel (the one chosen for the
/// DPIM ensemble) on a shared grid, so the CDF gap reflects the ensembles
/// rather than different smoothing widths.
pub fn damage_cdf_gap(dpim: &ResponseEnsemble, mcs: &ResponseEnsemble, bandwidth: Bandwidth, base: &GridSpec) -> Result<f64> {
    let sigma = match bandwidth {
        Bandwidth::Fixed(s) => s,
        Bandwidth::Silverman => silverman_bandwidth(dpim),
    };
    let sigma = if sigma > 0.0 {
        sigma
    } else {
        silverman_bandwidth(mcs).max(f64::MIN_POSITIVE)
    };
    let (lo, hi) = dpim
        .values
        .iter()
        .chain(&mcs.values)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let grid = GridSpec {
        span: Some((lo - base.pad * sigma, hi + base.pad * sigma)),
        ..*base
    };
    let a = estimate_pdf(dpim, &grid, Bandwidth::Fixed(sigma))?;
    let b = estimate_pdf(mcs, &grid, Bandwidth::Fixed(sigma))?;
    Ok(cdf_distance(&a, &b)?)
}

pub fn consistency(
    cfg: &RunConfig,
    damage: &[PointDamage],
    probs: &[f64],
    mcs_damage: &[PointDamage],
) -> Result<Vec<Consistency>> {
    let mut out = Vec::new();
    for spot in Hotspot::ALL {
        let r = rates(damage, spot);
        let rm = rates(mcs_damage, spot);
        for &y in &cfg.years {
            let t = years_to_seconds(y);
            let z = performance_values(&r, probs, t, cfg.threshold)?;
            let m = mcs_reliability(&rm, t, cfg.threshold)?;
            let a = ResponseEnsemble::new(cumulative_damage(&r, y), probs.to_vec(), spot.name())?;
            let b = ResponseEnsemble::equally_weighted(cumulative_damage(&rm, y), spot.name())?;
            out.push(Consistency {
                hotspot: spot.name(),
                years: y,
                r_dpim: fowt_dpim::dpim::reliability(&z),
                r_mcs: m.reliability,
                se_mcs: m.std_error,
                tolerance: (3.0 * m.std_error).max(0.02),
                pdf_ks: damage_cdf_gap(&a, &b, cfg.dpim.bandwidth, &cfg.dpim.grid)?,
            });
        }
    }
    Ok(out)
}
