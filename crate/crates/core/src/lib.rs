//! Fatigue reliability of a spar-type floating wind turbine.
//!
//! The pipeline runs representative environmental points through a
//! reduced-order load simulator, converts loads to tower-base and blade-root
//! stresses, accumulates rainflow/Miner damage and integrates the point
//! probabilities into damage densities and reliability curves.

pub mod analysis;
pub mod distributions;
pub mod dpim;
pub mod error;
pub mod fatigue;
pub mod io;
pub mod pointset;
pub mod seed;
pub mod simulator;
pub mod stress;

pub use distributions::DistributionSpec;
pub use error::{Error, Result};
pub use pointset::{EnvironmentModel, EnvironmentalPoint, RepresentativePointSet};
pub use simulator::{simulate, LoadTimeSeries, SimulationConfig, TurbineParams};
