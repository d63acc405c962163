//! Hydrogen storage potential of salt caverns: deposit screening, land eligibility,
//! cavern packing, working-gas capacity and country-level sufficiency.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod eligibility;
pub mod energy_system;
mod error;
pub mod geodata_io;
pub mod geology;
pub mod geometry;
pub mod placement;
pub mod scenario;

pub use capacity::{cavern_capacity, CompressibilityTable, ThermoParams};
pub use eligibility::{Drilling, DrillingMode, EligibilityRaster, Mask};
pub use energy_system::{ShareMode, Sufficiency, SufficiencyLedger};
pub use error::{Error, Result};
pub use geodata_io::{DepthInterval, ExclusionCategory, ExclusionLayer, LocalGrid, SaltDeposit, SaltType, SuitabilityHint};
pub use geology::{GeologyCase, Suitability, SuitabilityCriteria};
pub use placement::{CavernPlacement, CavernSpec, SeparationFactor};
pub use scenario::{run_scenario, ScenarioConfig};
