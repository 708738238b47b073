//! Per-point fatigue evaluation: loads, hot-spot stresses and short-term damage.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fatigue::{stress_damage, DamageResult, Goodman, SnCurve};
use crate::pointset::EnvironmentalPoint;
use crate::simulator::{simulate, LoadTimeSeries, SimulationConfig, TurbineParams};
use crate::stress::{
    blade_axial_stress, blade_equivalent_stress, blade_shear_stress, tower_node_stresses, BladeSection,
    TowerSection, TOWER_NODES,
};

/// Material curves and blade-root geometry used for damage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FatigueModel {
    pub tower_curve: SnCurve,
    pub blade_curve: SnCurve,
    pub goodman: Goodman,
    pub blade_section: BladeSection,
}

impl Default for FatigueModel {
    fn default() -> Self {
        Self {
            tower_curve: SnCurve::steel_tower(),
            blade_curve: SnCurve::composite_blade(),
            goodman: Goodman::default(),
            blade_section: BladeSection::annulus(3.542, 0.05).expect("valid default blade root"),
        }
    }
}

impl FatigueModel {
    pub fn validate(&self) -> Result<()> {
        self.tower_curve.validate()?;
        self.blade_curve.validate()?;
        self.blade_section.validate()
    }
}

/// Short-term damage and mean stress at the seven tower-base nodes and the
/// blade root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointDamage {
    pub tower: [DamageResult; TOWER_NODES],
    pub blade: DamageResult,
    /// Pa.
    pub tower_mean_stress: [f64; TOWER_NODES],
    /// Mean equivalent stress, Pa.
    pub blade_mean_stress: f64,
}

impl PointDamage {
    /// Lee-side tower node.
    pub fn tower_node7(&self) -> &DamageResult {
        &self.tower[TOWER_NODES - 1]
    }
}

pub fn tower_section(params: &TurbineParams) -> Result<TowerSection> {
    TowerSection::annulus(params.tower_base_outer_diameter, params.tower_base_wall_thickness)
}

pub fn damage_from_loads(loads: &LoadTimeSeries, params: &TurbineParams, model: &FatigueModel) -> Result<PointDamage> {
    model.validate()?;
    let geom = tower_section(params)?;
    let nodes = tower_node_stresses(loads, &geom);
    let mut tower = Vec::with_capacity(TOWER_NODES);
    for s in &nodes {
        tower.push(stress_damage(s, &model.tower_curve, &model.goodman)?);
    }
    let sigma = blade_axial_stress(loads, &model.blade_section);
    let tau = blade_shear_stress(loads, &model.blade_section);
    let eq = blade_equivalent_stress(&sigma, &tau)?;
    let blade = stress_damage(&eq, &model.blade_curve, &model.goodman)?;
    let mut tower_mean_stress = [0.0; TOWER_NODES];
    for (m, s) in tower_mean_stress.iter_mut().zip(&nodes) {
        *m = s.mean();
    }
    Ok(PointDamage {
        tower: tower.try_into().expect("seven tower nodes"),
        blade,
        tower_mean_stress,
        blade_mean_stress: eq.mean(),
    })
}

pub fn evaluate_point(
    theta: &EnvironmentalPoint,
    config: &SimulationConfig,
    params: &TurbineParams,
    model: &FatigueModel,
) -> Result<PointDamage> {
    let loads = simulate(theta, config, params)?;
    damage_from_loads(&loads, params, model)
}
