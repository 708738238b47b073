//! Section loads to nominal stress histories.
//!
//! The tower base is a thin annulus evaluated at seven circumferential nodes
//! spaced 30 deg apart on the half circumference; angles are measured
//! counterclockwise from the negative X axis, so node 1 faces the incoming
//! wind and node 7 sits on the lee side. The blade root is a circular ring
//! whose axial and shear stresses are merged into one distortion-energy
//! equivalent stress.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::simulator::LoadTimeSeries;

pub const TOWER_NODES: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct StressTimeSeries {
    pub dt: f64,
    /// Pa.
    pub samples: Vec<f64>,
}

impl StressTimeSeries {
    pub fn new(dt: f64, samples: Vec<f64>) -> Self {
        Self { dt, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }
}

/// Tower-base annulus properties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TowerSection {
    /// m^2.
    pub area: f64,
    /// m^4.
    pub i_x: f64,
    /// m^4.
    pub i_y: f64,
    /// Outer radius, m.
    pub radius: f64,
}

impl TowerSection {
    pub fn annulus(outer_diameter: f64, thickness: f64) -> Result<Self> {
        check_annulus(outer_diameter, thickness)?;
        let d_i = outer_diameter - 2.0 * thickness;
        let d2 = outer_diameter * outer_diameter;
        let di2 = d_i * d_i;
        let i = PI * (d2 * d2 - di2 * di2) / 64.0;
        Ok(Self {
            area: PI * (d2 - di2) / 4.0,
            i_x: i,
            i_y: i,
            radius: 0.5 * outer_diameter,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if [self.area, self.i_x, self.i_y, self.radius]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
        {
            Ok(())
        } else {
            Err(domain("tower section properties must be > 0"))
        }
    }
}

/// Blade-root ring properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BladeSection {
    /// m^2.
    pub area: f64,
    /// Bending section modulus, m^3.
    pub w_n: f64,
    /// Torsional section modulus, m^3.
    pub w_p: f64,
}

impl BladeSection {
    pub fn annulus(outer_diameter: f64, thickness: f64) -> Result<Self> {
        check_annulus(outer_diameter, thickness)?;
        let d_i = outer_diameter - 2.0 * thickness;
        let d2 = outer_diameter * outer_diameter;
        let di2 = d_i * d_i;
        let w_n = PI * (d2 * d2 - di2 * di2) / (32.0 * outer_diameter);
        Ok(Self {
            area: PI * (d2 - di2) / 4.0,
            w_n,
            w_p: 2.0 * w_n,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if [self.area, self.w_n, self.w_p]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
        {
            Ok(())
        } else {
            Err(domain("blade section properties must be > 0"))
        }
    }
}

fn check_annulus(outer_diameter: f64, thickness: f64) -> Result<()> {
    if !(outer_diameter > 0.0 && thickness > 0.0 && thickness < 0.5 * outer_diameter) {
        return Err(domain(format!(
            "annulus needs 0 < thickness < diameter / 2, got D = {outer_diameter}, t = {thickness}"
        )));
    }
    Ok(())
}

/// Angle of tower node `k` (1-based), radians.
pub fn node_angle(k: usize) -> f64 {
    assert!((1..=TOWER_NODES).contains(&k), "tower node {k} out of range");
    (k - 1) as f64 * PI / 6.0
}

/// `(cos, sin)` at a node, exact at 0, 90 and 180 deg.
fn node_components(k: usize) -> (f64, f64) {
    match k {
        1 => (1.0, 0.0),
        4 => (0.0, 1.0),
        7 => (-1.0, 0.0),
        _ => {
            let a = node_angle(k);
            (a.cos(), a.sin())
        }
    }
}

#[inline]
fn axial(nz: f64, mx: f64, my: f64, geom: &TowerSection, cos_a: f64, sin_a: f64) -> f64 {
    nz / geom.area + my / geom.i_y * geom.radius * cos_a - mx / geom.i_x * geom.radius * sin_a
}

fn tower_stress_with(loads: &LoadTimeSeries, geom: &TowerSection, cos_a: f64, sin_a: f64) -> StressTimeSeries {
    let samples = loads
        .nz
        .iter()
        .zip(&loads.mx_tower)
        .zip(&loads.my_tower)
        .map(|((&nz, &mx), &my)| axial(nz, mx, my, geom, cos_a, sin_a))
        .collect();
    StressTimeSeries::new(loads.dt, samples)
}

/// Nominal axial stress at circumferential angle `alpha` (radians).
pub fn tower_axial_stress(loads: &LoadTimeSeries, geom: &TowerSection, alpha: f64) -> StressTimeSeries {
    tower_stress_with(loads, geom, alpha.cos(), alpha.sin())
}

/// Axial stress at the seven tower-base nodes, node 1 first.
pub fn tower_node_stresses(loads: &LoadTimeSeries, geom: &TowerSection) -> Vec<StressTimeSeries> {
    (1..=TOWER_NODES)
        .map(|k| {
            let (c, s) = node_components(k);
            tower_stress_with(loads, geom, c, s)
        })
        .collect()
}

/// Stress at a single node.
pub fn tower_node_stress(loads: &LoadTimeSeries, geom: &TowerSection, node: usize) -> StressTimeSeries {
    let (c, s) = node_components(node);
    tower_stress_with(loads, geom, c, s)
}

/// `sqrt(Mx^2 + My^2) / W_n + Fz / A`.
pub fn blade_axial_stress(loads: &LoadTimeSeries, geom: &BladeSection) -> StressTimeSeries {
    let samples = loads
        .mx_blade
        .iter()
        .zip(&loads.my_blade)
        .zip(&loads.fz_blade)
        .map(|((&mx, &my), &fz)| mx.hypot(my) / geom.w_n + fz / geom.area)
        .collect();
    StressTimeSeries::new(loads.dt, samples)
}

/// `sqrt(Fx^2 + Fy^2) / A + Mz / W_p`.
pub fn blade_shear_stress(loads: &LoadTimeSeries, geom: &BladeSection) -> StressTimeSeries {
    let samples = loads
        .fx_blade
        .iter()
        .zip(&loads.fy_blade)
        .zip(&loads.mz_blade)
        .map(|((&fx, &fy), &mz)| fx.hypot(fy) / geom.area + mz / geom.w_p)
        .collect();
    StressTimeSeries::new(loads.dt, samples)
}

/// `sqrt(sigma^2 + 3 tau^2)` sample by sample.
pub fn blade_equivalent_stress(
    sigma: &StressTimeSeries,
    tau: &StressTimeSeries,
) -> Result<StressTimeSeries> {
    if sigma.len() != tau.len() {
        return Err(Error::LengthMismatch {
            what: "axial vs shear stress",
            left: sigma.len(),
            right: tau.len(),
        });
    }
    let samples = sigma
        .samples
        .iter()
        .zip(&tau.samples)
        .map(|(&s, &t)| (s * s + 3.0 * t * t).sqrt())
        .collect();
    Ok(StressTimeSeries::new(sigma.dt, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_loads(nz: f64, mx: f64, my: f64) -> LoadTimeSeries {
        let z = vec![0.0; 3];
        LoadTimeSeries::from_channels(
            0.1,
            [
                vec![nz; 3],
                vec![mx; 3],
                vec![my; 3],
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
                z,
            ],
        )
        .unwrap()
    }

    fn unit_blade() -> BladeSection {
        BladeSection {
            area: 1.0,
            w_n: 1.0,
            w_p: 1.0,
        }
    }

    #[test]
    fn annulus_formulas() {
        let g = TowerSection::annulus(6.5, 0.027).unwrap();
        let d_i: f64 = 6.5 - 0.054;
        assert!((g.area - PI * (6.5f64.powi(2) - d_i.powi(2)) / 4.0).abs() < 1e-12);
        assert!((g.i_x - PI * (6.5f64.powi(4) - d_i.powi(4)) / 64.0).abs() < 1e-12);
        assert_eq!(g.i_x, g.i_y);
        assert!(TowerSection::annulus(6.5, 3.25).is_err());
    }

    #[test]
    fn pure_axial_is_uniform() {
        let g = TowerSection::annulus(6.5, 0.027).unwrap();
        let loads = constant_loads(-1e7, 0.0, 0.0);
        for s in tower_node_stresses(&loads, &g) {
            assert!((s.samples[0] + 1e7 / g.area).abs() < 1e-6);
        }
    }

    #[test]
    fn quarter_angle_drops_pitch_moment() {
        let g = TowerSection::annulus(6.5, 0.027).unwrap();
        let loads = constant_loads(-1e7, 2e7, 5e7);
        let s = tower_node_stress(&loads, &g, 4).samples[0];
        assert_eq!(s, -1e7 / g.area - 2e7 / g.i_x * g.radius);
    }

    #[test]
    fn blade_hand_checks() {
        let mut loads = constant_loads(0.0, 0.0, 0.0);
        loads.mx_blade = vec![3.0; 3];
        loads.my_blade = vec![4.0; 3];
        assert_eq!(blade_axial_stress(&loads, &unit_blade()).samples[0], 5.0);

        loads.mx_blade = vec![-3.0; 3];
        loads.my_blade = vec![-4.0; 3];
        assert_eq!(blade_axial_stress(&loads, &unit_blade()).samples[0], 5.0);

        loads.fx_blade = vec![6.0; 3];
        loads.fy_blade = vec![8.0; 3];
        let geom = BladeSection {
            area: 2.0,
            ..unit_blade()
        };
        assert_eq!(blade_shear_stress(&loads, &geom).samples[0], 5.0);

        loads.mz_blade = vec![-1.0; 3];
        assert_eq!(blade_shear_stress(&loads, &geom).samples[0], 4.0);
    }

    #[test]
    fn zero_shear_without_loads() {
        let loads = constant_loads(0.0, 0.0, 0.0);
        assert_eq!(blade_shear_stress(&loads, &unit_blade()).samples, vec![0.0; 3]);
        assert_eq!(blade_axial_stress(&loads, &unit_blade()).samples, vec![0.0; 3]);
    }

    #[test]
    fn equivalent_stress_hand_checks() {
        let s = |v: f64| StressTimeSeries::new(1.0, vec![v]);
        assert_eq!(blade_equivalent_stress(&s(-7.0), &s(0.0)).unwrap().samples[0], 7.0);
        assert_eq!(blade_equivalent_stress(&s(0.0), &s(1.0)).unwrap().samples[0], 3f64.sqrt());
        assert_eq!(blade_equivalent_stress(&s(4.0), &s(3.0)).unwrap().samples[0], 43f64.sqrt());
        let long = StressTimeSeries::new(1.0, vec![0.0; 2]);
        assert!(blade_equivalent_stress(&long, &s(1.0)).is_err());
    }
}
