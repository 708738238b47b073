//! Representative point sets over the environmental space.
//!
//! Points come from a digitally shifted Sobol' sequence mapped through the
//! marginal quantile functions. Each point then receives the probability mass
//! of its Voronoi cell, estimated by dropping i.i.d. samples from the joint law
//! and counting nearest neighbours.

mod sobol;

pub use sobol::Sobol3;

use log::warn;
use rand::distr::Open01;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{domain, Error, Result};
use crate::seed::{self, Purpose};

/// One realization of the environmental random vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentalPoint {
    /// Mean wind speed at hub height, m/s.
    pub v_w: f64,
    /// Significant wave height, m.
    pub h_s: f64,
    /// Spectral peak period, s.
    pub t_p: f64,
}

impl EnvironmentalPoint {
    pub fn new(v_w: f64, h_s: f64, t_p: f64) -> Self {
        Self { v_w, h_s, t_p }
    }

    fn coords(&self) -> [f64; 3] {
        [self.v_w, self.h_s, self.t_p]
    }

    fn from_coords(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }
}

/// Joint law of (V_w, H_s, T_p) as independent marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentModel {
    pub wind_speed: DistributionSpec,
    pub wave_height: DistributionSpec,
    pub peak_period: DistributionSpec,
}

impl Default for EnvironmentModel {
    fn default() -> Self {
        Self {
            wind_speed: DistributionSpec::WIND_SPEED,
            wave_height: DistributionSpec::WAVE_HEIGHT,
            peak_period: DistributionSpec::PEAK_PERIOD,
        }
    }
}

impl EnvironmentModel {
    pub fn marginals(&self) -> [DistributionSpec; 3] {
        [self.wind_speed, self.wave_height, self.peak_period]
    }

    pub fn validate(&self) -> Result<()> {
        self.marginals().iter().try_for_each(|d| d.validate())
    }

    /// Maps a point of the unit cube through the marginal quantiles.
    pub fn transform(&self, u: [f64; 3]) -> Result<EnvironmentalPoint> {
        let m = self.marginals();
        Ok(EnvironmentalPoint::new(
            m[0].inverse_cdf(u[0])?,
            m[1].inverse_cdf(u[1])?,
            m[2].inverse_cdf(u[2])?,
        ))
    }

    /// Whether `p` lies in the joint support box.
    pub fn contains(&self, p: &EnvironmentalPoint) -> bool {
        self.marginals()
            .iter()
            .zip(p.coords())
            .all(|(d, x)| {
                let (lo, hi) = d.support();
                x >= lo && x <= hi && x.is_finite()
            })
    }

    fn scales(&self) -> Result<[f64; 3]> {
        let m = self.marginals();
        Ok([
            m[0].interquartile_range()?,
            m[1].interquartile_range()?,
            m[2].interquartile_range()?,
        ])
    }
}

/// Points with assigned probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativePointSet {
    pub points: Vec<EnvironmentalPoint>,
    pub probabilities: Vec<f64>,
}

impl RepresentativePointSet {
    pub fn new(points: Vec<EnvironmentalPoint>, probabilities: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("representative point set".into()));
        }
        if points.len() != probabilities.len() {
            return Err(Error::LengthMismatch {
                what: "points vs probabilities",
                left: points.len(),
                right: probabilities.len(),
            });
        }
        if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(domain("assigned probabilities must be finite and nonnegative"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(domain(format!("assigned probabilities sum to {total}, expected 1")));
        }
        Ok(Self {
            points,
            probabilities,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Probability-weighted mean of `f` over the set.
    pub fn expectation(&self, f: impl Fn(&EnvironmentalPoint) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.probabilities)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}

/// Knobs for the two-step construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointSetOptions {
    /// Voronoi samples per representative point.
    pub samples_per_point: usize,
    /// Re-place each coordinate at the marginal quantile of its cumulative
    /// assigned probability after the first assignment.
    pub rearrange: bool,
}

impl Default for PointSetOptions {
    fn default() -> Self {
        Self {
            samples_per_point: 100,
            rearrange: false,
        }
    }
}

pub fn generate_gf_points(
    model: &EnvironmentModel,
    n: usize,
    seed: u64,
) -> Result<RepresentativePointSet> {
    generate_gf_points_with(model, n, seed, &PointSetOptions::default())
}

pub fn generate_gf_points_with(
    model: &EnvironmentModel,
    n: usize,
    seed: u64,
    opts: &PointSetOptions,
) -> Result<RepresentativePointSet> {
    model.validate()?;
    if n == 0 {
        return Err(Error::Empty("point count must be at least 1".into()));
    }
    if n > u32::MAX as usize {
        return Err(domain(format!("point count {n} exceeds the sequence length")));
    }
    if opts.samples_per_point < 10 {
        return Err(domain("samples_per_point must be at least 10"));
    }
    let mut shift_rng = seed::rng(seed::derive(seed, Purpose::PointShift, 0));
    let sobol = Sobol3::new([shift_rng.random(), shift_rng.random(), shift_rng.random()]);
    let mut points = (0..n as u32)
        .map(|i| model.transform(sobol.point(i)))
        .collect::<Result<Vec<_>>>()?;

    let m_mc = n * opts.samples_per_point;
    let probabilities = assign_probabilities(&points, model, m_mc, seed)?;
    if opts.rearrange {
        rearrange(&mut points, &probabilities, model)?;
    }
    RepresentativePointSet::new(points, probabilities)
}

fn rearrange(
    points: &mut [EnvironmentalPoint],
    probabilities: &[f64],
    model: &EnvironmentModel,
) -> Result<()> {
    let marginals = model.marginals();
    let mut coords: Vec<[f64; 3]> = points.iter().map(|p| p.coords()).collect();
    for (d, marginal) in marginals.iter().enumerate() {
        let mut order: Vec<usize> = (0..coords.len()).collect();
        order.sort_by(|&a, &b| coords[a][d].total_cmp(&coords[b][d]).then(a.cmp(&b)));
        let mut cumulative = 0.0;
        for &i in &order {
            let u = (cumulative + 0.5 * probabilities[i]).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
            coords[i][d] = marginal.inverse_cdf(u)?;
            cumulative += probabilities[i];
        }
    }
    for (p, c) in points.iter_mut().zip(coords) {
        *p = EnvironmentalPoint::from_coords(c);
    }
    Ok(())
}

const CHUNK: usize = 4096;

/// Voronoi-cell probabilities by nearest-neighbour counting of `m_mc` i.i.d.
/// samples. Distances are Euclidean after dividing each coordinate by its
/// marginal interquartile range; ties go to the lowest index.
pub fn assign_probabilities(
    points: &[EnvironmentalPoint],
    model: &EnvironmentModel,
    m_mc: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    model.validate()?;
    if points.is_empty() {
        return Err(Error::Empty("cannot assign probabilities to no points".into()));
    }
    if m_mc < 10 * points.len() {
        return Err(domain(format!(
            "need at least {} Voronoi samples for {} points, got {m_mc}",
            10 * points.len(),
            points.len()
        )));
    }
    if points.len() == 1 {
        return Ok(vec![1.0]);
    }
    let scales = model.scales()?;
    let search = NearestSearch::new(points, scales);
    if search.has_duplicates() {
        warn!("representative point set contains duplicated points; ties go to the lowest index");
    }

    let chunks = m_mc.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Vec<u64>> {
            let mut local = vec![0u64; points.len()];
            let mut rng = seed::rng(seed::derive(seed, Purpose::Voronoi, c as u64));
            let len = CHUNK.min(m_mc - c * CHUNK);
            for _ in 0..len {
                let u = [rng.sample(Open01), rng.sample(Open01), rng.sample(Open01)];
                let s = model.transform(u)?;
                local[search.nearest(&s)] += 1;
            }
            Ok(local)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = vec![0u64; points.len()];
    for local in counts {
        for (t, c) in total.iter_mut().zip(local) {
            *t += c;
        }
    }
    Ok(total.into_iter().map(|c| c as f64 / m_mc as f64).collect())
}

/// Nearest-neighbour search that prunes on the first standardized coordinate.
struct NearestSearch {
    scaled: Vec<[f64; 3]>,
    order: Vec<usize>,
    keys: Vec<f64>,
    scales: [f64; 3],
}

impl NearestSearch {
    fn new(points: &[EnvironmentalPoint], scales: [f64; 3]) -> Self {
        let scaled: Vec<[f64; 3]> = points
            .iter()
            .map(|p| {
                let c = p.coords();
                [c[0] / scales[0], c[1] / scales[1], c[2] / scales[2]]
            })
            .collect();
        let mut order: Vec<usize> = (0..scaled.len()).collect();
        order.sort_by(|&a, &b| scaled[a][0].total_cmp(&scaled[b][0]).then(a.cmp(&b)));
        let keys = order.iter().map(|&i| scaled[i][0]).collect();
        Self {
            scaled,
            order,
            keys,
            scales,
        }
    }

    fn has_duplicates(&self) -> bool {
        self.order
            .windows(2)
            .any(|w| self.scaled[w[0]] == self.scaled[w[1]])
    }

    fn nearest(&self, p: &EnvironmentalPoint) -> usize {
        let c = p.coords();
        let q = [c[0] / self.scales[0], c[1] / self.scales[1], c[2] / self.scales[2]];
        let start = self.keys.partition_point(|&k| k < q[0]);
        let mut best = (f64::INFINITY, usize::MAX);
        let consider = |slot: usize, best: &mut (f64, usize)| -> bool {
            let gap = self.keys[slot] - q[0];
            if gap * gap > best.0 {
                return false;
            }
            let i = self.order[slot];
            let s = &self.scaled[i];
            let d = (s[0] - q[0]).powi(2) + (s[1] - q[1]).powi(2) + (s[2] - q[2]).powi(2);
            if d < best.0 || (d == best.0 && i < best.1) {
                *best = (d, i);
            }
            true
        };
        let mut up = start;
        let mut down = start;
        let (mut up_open, mut down_open) = (true, true);
        while up_open || down_open {
            if up_open {
                if up < self.keys.len() && consider(up, &mut best) {
                    up += 1;
                } else {
                    up_open = false;
                }
            }
            if down_open {
                if down > 0 && consider(down - 1, &mut best) {
                    down -= 1;
                } else {
                    down_open = false;
                }
            }
        }
        best.1
    }
}

/// Plain Monte Carlo samples by inverse transform.
pub fn sample_mcs(model: &EnvironmentModel, n: usize, seed: u64) -> Result<Vec<EnvironmentalPoint>> {
    model.validate()?;
    if n == 0 {
        return Err(Error::Empty("sample count must be at least 1".into()));
    }
    let mut rng = seed::rng(seed::derive(seed, Purpose::MonteCarlo, 0));
    (0..n)
        .map(|_| {
            let u = [rng.sample(Open01), rng.sample(Open01), rng.sample(Open01)];
            model.transform(u)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_takes_all_mass() {
        let set = generate_gf_points(&EnvironmentModel::default(), 1, 3).unwrap();
        assert_eq!(set.probabilities, vec![1.0]);
    }

    #[test]
    fn zero_points_is_an_error() {
        assert!(matches!(
            generate_gf_points(&EnvironmentModel::default(), 0, 3),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn too_few_voronoi_samples_rejected() {
        let model = EnvironmentModel::default();
        let pts = sample_mcs(&model, 5, 1).unwrap();
        assert!(assign_probabilities(&pts, &model, 49, 1).is_err());
        assert!(assign_probabilities(&pts, &model, 50, 1).is_ok());
    }

    #[test]
    fn duplicated_points_break_ties_by_index() {
        let model = EnvironmentModel::default();
        let p = EnvironmentalPoint::new(10.0, 1.5, 8.0);
        let probs = assign_probabilities(&[p, p, p], &model, 1000, 9).unwrap();
        assert_eq!(probs, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn nearest_search_matches_brute_force() {
        let model = EnvironmentModel::default();
        let pts = sample_mcs(&model, 300, 11).unwrap();
        let scales = model.scales().unwrap();
        let search = NearestSearch::new(&pts, scales);
        for q in sample_mcs(&model, 500, 12).unwrap() {
            let brute = pts
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let d: f64 = (0..3)
                        .map(|k| ((p.coords()[k] - q.coords()[k]) / scales[k]).powi(2))
                        .sum();
                    (d, i)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .unwrap()
                .1;
            assert_eq!(search.nearest(&q), brute);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let model = EnvironmentModel::default();
        let a = generate_gf_points(&model, 64, 5).unwrap();
        let b = generate_gf_points(&model, 64, 5).unwrap();
        assert_eq!(a, b);
        let c = generate_gf_points(&model, 64, 6).unwrap();
        assert_ne!(a, c);
    }
}
