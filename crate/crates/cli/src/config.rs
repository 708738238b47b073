use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

use fowt_dpim::analysis::FatigueModel;
use fowt_dpim::dpim::{Bandwidth, GridSpec};
use fowt_dpim::pointset::{EnvironmentModel, PointSetOptions};
use fowt_dpim::simulator::{SimulationConfig, StructuralModes, TurbineParams, RotorModel, WaveModel, WindModel};

/// Bad or inconsistent configuration; maps to exit code 1.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Simulation settings shared by every point; heading and seed are set per run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSettings {
    pub duration: f64,
    pub dt: f64,
    pub transient: f64,
    pub wind: WindModel,
    pub waves: WaveModel,
    pub rotor: RotorModel,
    pub modes: StructuralModes,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        let d = SimulationConfig::default();
        Self {
            duration: d.duration,
            dt: d.dt,
            transient: d.transient,
            wind: d.wind,
            waves: d.waves,
            rotor: d.rotor,
            modes: d.modes,
        }
    }
}

impl SimulationSettings {
    pub fn config(&self, heading: f64, seed: u64) -> SimulationConfig {
        SimulationConfig {
            duration: self.duration,
            dt: self.dt,
            transient: self.transient,
            wave_heading: heading,
            seed,
            wind: self.wind,
            waves: self.waves,
            rotor: self.rotor,
            modes: self.modes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DpimSettings {
    pub grid: GridSpec,
    pub bandwidth: Bandwidth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Representative points per heading.
    pub points: usize,
    /// Monte Carlo benchmark samples per heading; 0 skips the benchmark.
    pub mcs_samples: usize,
    /// Independent load realizations per point.
    pub seeds_per_point: usize,
    /// Wave headings, degrees.
    pub headings: Vec<f64>,
    /// Reporting times, years.
    pub years: Vec<f64>,
    /// Damage threshold B.
    pub threshold: f64,
    pub out: PathBuf,
    /// Keep per-point load CSVs from `run`.
    pub save_loads: bool,
    /// Write SVG figures after `run`.
    pub plots: bool,
    pub environment: EnvironmentModel,
    pub point_set: PointSetOptions,
    pub simulation: SimulationSettings,
    pub turbine: TurbineParams,
    pub fatigue: FatigueModel,
    pub dpim: DpimSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            points: 1000,
            mcs_samples: 10_000,
            seeds_per_point: 1,
            headings: vec![0.0, 30.0, 60.0, 90.0],
            years: vec![5.0, 10.0, 15.0, 20.0, 25.0],
            threshold: 1.0,
            out: PathBuf::from("out"),
            save_loads: false,
            plots: true,
            environment: EnvironmentModel::default(),
            point_set: PointSetOptions::default(),
            simulation: SimulationSettings::default(),
            turbine: TurbineParams::default(),
            fatigue: FatigueModel::default(),
            dpim: DpimSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError(m));
        if self.points == 0 {
            return bad("points must be at least 1".into());
        }
        if self.seeds_per_point == 0 {
            return bad("seeds_per_point must be at least 1".into());
        }
        if self.mcs_samples != 0 && self.mcs_samples < fowt_dpim::dpim::MIN_MCS_SAMPLES {
            return bad(format!(
                "mcs_samples must be 0 or at least {}",
                fowt_dpim::dpim::MIN_MCS_SAMPLES
            ));
        }
        if self.headings.is_empty() {
            return bad("at least one heading is required".into());
        }
        if let Some(h) = self.headings.iter().find(|h| !(0.0..=90.0).contains(*h)) {
            return bad(format!("heading {h} outside [0, 90] deg"));
        }
        let mut sorted = self.headings.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return bad("headings must be distinct".into());
        }
        if self.years.is_empty() {
            return bad("at least one reporting time is required".into());
        }
        if self.years.iter().any(|y| !(*y >= 0.0 && y.is_finite())) || self.years.windows(2).any(|w| w[1] <= w[0]) {
            return bad("reporting times must be finite, >= 0 and strictly ascending".into());
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return bad(format!("threshold must be > 0, got {}", self.threshold));
        }
        let domain = |e: fowt_dpim::Error| ConfigError(e.to_string());
        self.environment.validate().map_err(domain)?;
        self.turbine.validate().map_err(domain)?;
        self.fatigue.validate().map_err(domain)?;
        self.simulation.config(0.0, 0).validate().map_err(domain)?;
        if self.point_set.samples_per_point < 10 {
            return bad("point_set.samples_per_point must be at least 10".into());
        }
        if let Bandwidth::Fixed(s) = self.dpim.bandwidth {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("dpim.bandwidth must be > 0, got {s}"));
            }
        }
        Ok(())
    }

    /// Directory holding the outputs of one heading.
    pub fn heading_dir(&self, heading: f64) -> PathBuf {
        self.out.join(heading_dir_name(heading))
    }
}

pub fn heading_dir_name(heading: f64) -> String {
    if heading.fract() == 0.0 {
        format!("heading_{:03}", heading as u32)
    } else {
        format!("heading_{heading}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn default_round_trips_through_toml() {
        let text = toml::to_string(&RunConfig::default()).unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_toml("points = 0").is_err());
        assert!(RunConfig::from_toml("headings = [0, 95]").is_err());
        assert!(RunConfig::from_toml("years = [20, 5]").is_err());
        assert!(RunConfig::from_toml("mcs_samples = 50").is_err());
        assert!(RunConfig::from_toml("unknown_key = 1").is_err());
        assert!(RunConfig::from_toml("[simulation]\nduration = 10.03\ndt = 0.1").is_err());
    }

    #[test]
    fn nested_overrides() {
        let cfg = RunConfig::from_toml(
            "[simulation]\nduration = 60.0\ndt = 0.1\n[fatigue.blade_curve]\nlog_a = 17.0\nslope = 8.0\nultimate = 5e8\n[dpim]\nbandwidth = { fixed = 0.25 }\n",
        )
        .unwrap();
        assert_eq!(cfg.simulation.duration, 60.0);
        assert_eq!(cfg.fatigue.blade_curve.log_a, 17.0);
        assert_eq!(cfg.dpim.bandwidth, Bandwidth::Fixed(0.25));
    }

    #[test]
    fn heading_names() {
        assert_eq!(heading_dir_name(0.0), "heading_000");
        assert_eq!(heading_dir_name(90.0), "heading_090");
        assert_eq!(heading_dir_name(22.5), "heading_22.5");
    }
}
