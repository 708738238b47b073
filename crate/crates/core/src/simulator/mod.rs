//! Reduced-order load model: environmental point to section-load time series.
//!
//! The rotor sees a single-point Kaimal wind history; thrust follows a
//! constant-C_T schedule below rated and a pitch-regulated schedule above.
//! The spar sees JONSWAP waves through a deep-water Morison inertia force.
//! Tower-base overturning moments pass through one linear mode per axis.
//! Blade-root loads combine the thrust share, 1P gravity, the aerodynamic
//! torque share and centrifugal tension, plus tower-top inertia.

mod filter;
pub mod spectral;
mod waves;
mod wind;

pub use filter::{ModeParams, SecondOrderFilter};
pub use waves::{heading_components, synthesize_waves, WaveField, WaveHarmonic, WaveModel};
pub use wind::{synthesize_wind, WindModel};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::pointset::EnvironmentalPoint;
use crate::seed::{self, Purpose};

/// Turbine geometry and operating envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TurbineParams {
    /// m above SWL.
    pub hub_height: f64,
    /// m above SWL.
    pub tower_base_elevation: f64,
    pub tower_base_outer_diameter: f64,
    pub tower_base_wall_thickness: f64,
    pub rotor_diameter: f64,
    pub cut_in_wind: f64,
    pub rated_wind: f64,
    pub cut_out_wind: f64,
    /// rpm at cut-in.
    pub min_rotor_speed: f64,
    /// rpm at rated.
    pub rated_rotor_speed: f64,
    /// m below SWL.
    pub spar_draft: f64,
}

impl Default for TurbineParams {
    fn default() -> Self {
        Self {
            hub_height: 90.0,
            tower_base_elevation: 10.0,
            tower_base_outer_diameter: 6.5,
            tower_base_wall_thickness: 0.027,
            rotor_diameter: 126.0,
            cut_in_wind: 3.0,
            rated_wind: 11.4,
            cut_out_wind: 25.0,
            min_rotor_speed: 6.9,
            rated_rotor_speed: 12.1,
            spar_draft: 120.0,
        }
    }
}

impl TurbineParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("hub_height", self.hub_height),
            ("tower_base_outer_diameter", self.tower_base_outer_diameter),
            ("tower_base_wall_thickness", self.tower_base_wall_thickness),
            ("rotor_diameter", self.rotor_diameter),
            ("cut_in_wind", self.cut_in_wind),
            ("rated_wind", self.rated_wind),
            ("cut_out_wind", self.cut_out_wind),
            ("min_rotor_speed", self.min_rotor_speed),
            ("rated_rotor_speed", self.rated_rotor_speed),
            ("spar_draft", self.spar_draft),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("turbine {name} must be > 0, got {v}")));
            }
        }
        if !(self.tower_base_elevation >= 0.0 && self.tower_base_elevation < self.hub_height) {
            return Err(domain("tower base must sit between SWL and hub height"));
        }
        if !(self.cut_in_wind < self.rated_wind && self.rated_wind < self.cut_out_wind) {
            return Err(domain("wind speeds must satisfy cut-in < rated < cut-out"));
        }
        if self.tower_base_wall_thickness >= 0.5 * self.tower_base_outer_diameter {
            return Err(domain("tower wall thickness must be below half the diameter"));
        }
        if self.min_rotor_speed > self.rated_rotor_speed {
            return Err(domain("minimum rotor speed exceeds rated rotor speed"));
        }
        Ok(())
    }

    pub fn rotor_area(&self) -> f64 {
        0.25 * PI * self.rotor_diameter * self.rotor_diameter
    }

    /// Rotor speed in rad/s, linear in mean wind between cut-in and rated.
    pub fn rotor_speed(&self, v_w: f64) -> f64 {
        let frac = ((v_w - self.cut_in_wind) / (self.rated_wind - self.cut_in_wind)).clamp(0.0, 1.0);
        let rpm = self.min_rotor_speed + frac * (self.rated_rotor_speed - self.min_rotor_speed);
        rpm * 2.0 * PI / 60.0
    }
}

/// Rotor aerodynamics and masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotorModel {
    pub air_density: f64,
    /// Thrust coefficient below rated; scaled by (v_rated / u)^2 above.
    pub thrust_coefficient: f64,
    /// Power coefficient below rated; scaled by (v_rated / u)^3 above.
    pub power_coefficient: f64,
    /// Rotor, nacelle and tower mass carried by the tower base, kg.
    pub topside_mass: f64,
    pub blade_mass: f64,
    /// Blade centre of mass from the root, m.
    pub blade_cg_radius: f64,
    /// Radius of the resultant aerodynamic blade load, m.
    pub thrust_radius: f64,
    /// Blade pitching moment as a fraction of the per-blade torque.
    pub pitch_moment_fraction: f64,
    /// Share of the hub-point turbulence felt by the whole rotor, in (0, 1].
    /// The default of 0.4 is a calibration of this reduced model.
    pub rotor_averaging: f64,
}

impl Default for RotorModel {
    fn default() -> Self {
        Self {
            air_density: 1.225,
            thrust_coefficient: 0.8,
            power_coefficient: 0.45,
            topside_mass: 6.0e5,
            blade_mass: 17_740.0,
            blade_cg_radius: 20.475,
            thrust_radius: 42.0,
            pitch_moment_fraction: 0.02,
            rotor_averaging: 0.4,
        }
    }
}

impl RotorModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("air_density", self.air_density),
            ("thrust_coefficient", self.thrust_coefficient),
            ("power_coefficient", self.power_coefficient),
            ("topside_mass", self.topside_mass),
            ("blade_mass", self.blade_mass),
            ("blade_cg_radius", self.blade_cg_radius),
            ("thrust_radius", self.thrust_radius),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("rotor {name} must be > 0, got {v}")));
            }
        }
        if !(self.rotor_averaging > 0.0 && self.rotor_averaging <= 1.0) {
            return Err(domain(format!(
                "rotor_averaging must lie in (0, 1], got {}",
                self.rotor_averaging
            )));
        }
        if !(self.pitch_moment_fraction >= 0.0 && self.pitch_moment_fraction.is_finite()) {
            return Err(domain("rotor pitch_moment_fraction must be >= 0"));
        }
        Ok(())
    }

    fn schedule(&self, v_w: f64, v_rated: f64, base: f64, power: i32) -> f64 {
        if v_w <= v_rated {
            base
        } else {
            base * (v_rated / v_w).powi(power)
        }
    }

    pub fn thrust_coefficient_at(&self, v_w: f64, v_rated: f64) -> f64 {
        self.schedule(v_w, v_rated, self.thrust_coefficient, 2)
    }

    pub fn power_coefficient_at(&self, v_w: f64, v_rated: f64) -> f64 {
        self.schedule(v_w, v_rated, self.power_coefficient, 3)
    }
}

/// One linear mode per filtered channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StructuralModes {
    pub tower_fore_aft: ModeParams,
    pub tower_side_side: ModeParams,
    pub heave: ModeParams,
    pub blade_flap: ModeParams,
}

impl Default for StructuralModes {
    fn default() -> Self {
        Self {
            tower_fore_aft: ModeParams::new(0.46, 0.05),
            tower_side_side: ModeParams::new(0.46, 0.05),
            heave: ModeParams::new(0.032, 0.1),
            blade_flap: ModeParams::new(0.68, 0.05),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    /// Analysis window, s.
    pub duration: f64,
    pub dt: f64,
    /// Simulated and discarded before the analysis window, s.
    pub transient: f64,
    /// Wave propagation direction relative to the wind (+X), degrees.
    pub wave_heading: f64,
    pub seed: u64,
    pub wind: WindModel,
    pub waves: WaveModel,
    pub rotor: RotorModel,
    pub modes: StructuralModes,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            duration: 600.0,
            dt: 0.05,
            transient: 60.0,
            wave_heading: 0.0,
            seed: 0,
            wind: WindModel::default(),
            waves: WaveModel::default(),
            rotor: RotorModel::default(),
            modes: StructuralModes::default(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(domain(format!("time step must be > 0, got {}", self.dt)));
        }
        step_count(self.duration, self.dt)?;
        if self.transient != 0.0 {
            step_count(self.transient, self.dt)?;
        }
        if !(0.0..=90.0).contains(&self.wave_heading) {
            return Err(domain(format!(
                "wave heading must lie in [0, 90] deg, got {}",
                self.wave_heading
            )));
        }
        self.wind.validate()?;
        self.waves.validate()?;
        self.rotor.validate()?;
        for m in [
            self.modes.tower_fore_aft,
            self.modes.tower_side_side,
            self.modes.heave,
            self.modes.blade_flap,
        ] {
            m.validate(self.dt)?;
        }
        Ok(())
    }

    pub fn analysis_steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    fn transient_steps(&self) -> usize {
        (self.transient / self.dt).round() as usize
    }
}

/// Number of steps in `duration`, which must be a whole multiple of `dt`.
pub(crate) fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(duration > 0.0 && duration.is_finite() && dt > 0.0) {
        return Err(domain(format!("duration must be > 0, got {duration}")));
    }
    let steps = duration / dt;
    let n = steps.round();
    if (steps - n).abs() > 1e-9 * n.max(1.0) || n < 2.0 {
        return Err(domain(format!(
            "duration {duration} s is not a whole number (>= 2) of {dt} s steps"
        )));
    }
    Ok(n as usize)
}

/// Section loads at the tower base and at one blade root.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadTimeSeries {
    pub dt: f64,
    /// Tower-base axial force, N (compression negative).
    pub nz: Vec<f64>,
    /// Tower-base roll moment, N m.
    pub mx_tower: Vec<f64>,
    /// Tower-base pitch moment, N m.
    pub my_tower: Vec<f64>,
    /// Blade-root out-of-plane shear, N.
    pub fx_blade: Vec<f64>,
    /// Blade-root in-plane shear, N.
    pub fy_blade: Vec<f64>,
    /// Blade-root axial force, N.
    pub fz_blade: Vec<f64>,
    /// Blade-root in-plane moment, N m.
    pub mx_blade: Vec<f64>,
    /// Blade-root out-of-plane moment, N m.
    pub my_blade: Vec<f64>,
    /// Blade-root pitching moment, N m.
    pub mz_blade: Vec<f64>,
}

impl LoadTimeSeries {
    pub const CHANNELS: [&'static str; 9] = [
        "Nz", "Mx_t", "My_t", "Fx_b", "Fy_b", "Fz_b", "Mx_b", "My_b", "Mz_b",
    ];

    pub fn len(&self) -> usize {
        self.nz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nz.is_empty()
    }

    pub fn channels(&self) -> [&[f64]; 9] {
        [
            &self.nz,
            &self.mx_tower,
            &self.my_tower,
            &self.fx_blade,
            &self.fy_blade,
            &self.fz_blade,
            &self.mx_blade,
            &self.my_blade,
            &self.mz_blade,
        ]
    }

    pub fn from_channels(dt: f64, channels: [Vec<f64>; 9]) -> Result<Self> {
        let [nz, mx_tower, my_tower, fx_blade, fy_blade, fz_blade, mx_blade, my_blade, mz_blade] =
            channels;
        let out = Self {
            dt,
            nz,
            mx_tower,
            my_tower,
            fx_blade,
            fy_blade,
            fz_blade,
            mx_blade,
            my_blade,
            mz_blade,
        };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(domain(format!("load series time step must be > 0, got {}", self.dt)));
        }
        let n = self.len();
        for (name, ch) in Self::CHANNELS.iter().zip(self.channels()) {
            if ch.len() != n {
                return Err(Error::LengthMismatch {
                    what: "load channels",
                    left: n,
                    right: ch.len(),
                });
            }
            if let Some(step) = ch.iter().position(|x| !x.is_finite()) {
                return Err(Error::Diverged {
                    channel: name,
                    step,
                });
            }
        }
        Ok(())
    }
}

fn mul_series(phasors: &[Complex64], transfer: impl Fn(f64) -> Complex64, freqs: &[f64]) -> Vec<Complex64> {
    phasors
        .iter()
        .zip(freqs)
        .map(|(p, &f)| p * transfer(f))
        .collect()
}

/// Evaluates the load model at one environmental point.
pub fn simulate(
    theta: &EnvironmentalPoint,
    config: &SimulationConfig,
    params: &TurbineParams,
) -> Result<LoadTimeSeries> {
    config.validate()?;
    params.validate()?;
    let dt = config.dt;
    let skip = config.transient_steps();
    let total = skip + config.analysis_steps();
    let total_duration = total as f64 * dt;
    let band = (params.cut_in_wind, params.cut_out_wind);

    let wind = synthesize_wind(
        theta.v_w,
        total_duration,
        dt,
        seed::derive(config.seed, Purpose::Wind, 0),
        &config.wind,
        band,
    )?;
    let sea = synthesize_waves(
        theta.h_s,
        theta.t_p,
        config.wave_heading,
        total_duration,
        dt,
        seed::derive(config.seed, Purpose::Waves, 0),
        &config.waves,
    )?;

    let waves = &config.waves;
    let draft = params.spar_draft;
    let freqs: Vec<f64> = sea.harmonics.iter().map(|h| h.frequency).collect();
    let phasors: Vec<Complex64> = sea.harmonics.iter().map(WaveHarmonic::phasor).collect();
    let wave_force = spectral::synthesize(
        total,
        &mul_series(&phasors, |f| waves.inertia_transfer(f, draft), &freqs),
    );
    let heave_force = spectral::synthesize(
        total,
        &mul_series(&phasors, |f| waves.heave_transfer_fn(f, draft), &freqs),
    );
    let (c_beta, s_beta) = heading_components(config.wave_heading);

    let rotor = &config.rotor;
        let area = params.rotor_area();
    let omega = params.rotor_speed(theta.v_w);
    let q_dyn = 0.5 * rotor.air_density * area;
    let g = waves.gravity;
    let thrust_arm = params.hub_height - params.tower_base_elevation;
    let mb = rotor.blade_mass;
    let rcg = rotor.blade_cg_radius;
    let rt = rotor.thrust_radius;

    let mut my_in = Vec::with_capacity(total);
    let mut mx_in = Vec::with_capacity(total);
    let mut flap_in = Vec::with_capacity(total);
    let mut mx_b = Vec::with_capacity(total);
    let mut fx_b = Vec::with_capacity(total);
    let mut fy_b = Vec::with_capacity(total);
    let mut fz_b = Vec::with_capacity(total);
    let mut mz_b = Vec::with_capacity(total);
    for j in 0..total {
        let u = theta.v_w + rotor.rotor_averaging * (wind[j] - theta.v_w);
        // Coefficients follow the instantaneous wind, so thrust and power level off above rated.
        let ct = rotor.thrust_coefficient_at(u.abs(), params.rated_wind);
        let cp = rotor.power_coefficient_at(u.abs(), params.rated_wind);
        let thrust = q_dyn * ct * u * u.abs();
        let torque = q_dyn * cp * u * u * u / omega;
        let fw = wave_force[j];
        let accel_fa = c_beta * fw * waves.tower_top_accel_per_newton;
        let accel_ss = s_beta * fw * waves.tower_top_accel_per_newton;
        let psi = omega * j as f64 * dt;
        let (sin_psi, cos_psi) = psi.sin_cos();

        my_in.push(thrust * thrust_arm + c_beta * fw * waves.moment_arm);
        mx_in.push(-(s_beta * fw * waves.moment_arm));
        flap_in.push(thrust / 3.0 * rt + mb * rcg * accel_fa);
        mx_b.push(mb * g * rcg * sin_psi + torque / 3.0 + mb * rcg * accel_ss);
        fx_b.push(thrust / 3.0 + mb * accel_fa);
        fy_b.push(mb * g * sin_psi + torque / (3.0 * rt) + mb * accel_ss);
        fz_b.push(mb * omega * omega * rcg - mb * g * cos_psi);
        mz_b.push(rotor.pitch_moment_fraction * torque / 3.0);
    }

    let modes = &config.modes;
    let my_t = SecondOrderFilter::new(modes.tower_fore_aft, dt)?.apply(&my_in);
    let mx_t = SecondOrderFilter::new(modes.tower_side_side, dt)?.apply(&mx_in);
    let my_b = SecondOrderFilter::new(modes.blade_flap, dt)?.apply(&flap_in);
    let heave = SecondOrderFilter::new(modes.heave, dt)?.apply(&heave_force);
    let weight = rotor.topside_mass * g;
    let nz: Vec<f64> = heave
        .iter()
        .map(|h| -weight - waves.heave_transfer * h)
        .collect();

    let window = |v: Vec<f64>| v[skip..].to_vec();
    LoadTimeSeries::from_channels(
        dt,
        [
            window(nz),
            window(mx_t),
            window(my_t),
            window(fx_b),
            window(fy_b),
            window(fz_b),
            window(mx_b),
            window(my_b),
            window(mz_b),
        ],
    )
}
