//! Input datasets: salt deposits, exclusion layers, national demand, region membership,
//! and the per-deposit metric grid everything is rasterized onto.

mod geojson;
mod grid;
mod tables;

pub use self::geojson::{deposits_to_geojson, load_deposits, load_shapes, parse_deposits};
pub use self::grid::{build_local_grid, LocalGrid, MAX_DEPOSIT_EXTENT_M};
pub use self::tables::{
    load_demand, load_exclusion_manifest, load_regions, parse_exclusion_manifest, DemandTable,
    RegionMap,
};

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::geometry::MultiPolygon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaltType {
    Domal,
    Bedded,
}

impl SaltType {
    pub fn as_str(self) -> &'static str {
        match self {
            SaltType::Domal => "domal",
            SaltType::Bedded => "bedded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuitabilityHint {
    #[default]
    Unknown,
    Guaranteed,
    Partial,
    Unsuitable,
}

impl SuitabilityHint {
    pub fn as_str(self) -> &'static str {
        match self {
            SuitabilityHint::Unknown => "unknown",
            SuitabilityHint::Guaranteed => "guaranteed",
            SuitabilityHint::Partial => "partial",
            SuitabilityHint::Unsuitable => "unsuitable",
        }
    }
}

/// Closed depth interval in meters below surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthInterval {
    pub min: f64,
    pub max: f64,
}

impl DepthInterval {
    pub fn new(min: f64, max: f64) -> Self {
        DepthInterval { min, max }
    }

    pub fn intersect(&self, other: &DepthInterval) -> Option<DepthInterval> {
        let lo = self.min.max(other.min);
        let hi = self.max.min(other.max);
        (lo <= hi).then_some(DepthInterval::new(lo, hi))
    }

    pub fn contains_interval(&self, other: &DepthInterval) -> bool {
        self.min <= other.min && other.max <= self.max
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaltDeposit {
    pub id: String,
    pub name: String,
    pub geometry: MultiPolygon,
    pub salt_type: SaltType,
    /// `None` when the source carries no depth information.
    pub depth_top_m: Option<DepthInterval>,
    pub thickness_m: Option<f64>,
    pub insoluble_fraction: Option<f64>,
    pub area_km2: f64,
    pub suitability_hint: SuitabilityHint,
    pub country_iso3: String,
}

impl SaltDeposit {
    /// True when any attribute needed for a definite classification is missing.
    pub fn has_unknown_attributes(&self) -> bool {
        self.depth_top_m.is_none() || self.thickness_m.is_none() || self.insoluble_fraction.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionCategory {
    Settlement,
    Infrastructure,
    SeismicFault,
    Airport,
    ProtectedArea,
    Forest,
    WaterStress,
    Other,
}

impl ExclusionCategory {
    pub const ALL: [ExclusionCategory; 8] = [
        ExclusionCategory::Settlement,
        ExclusionCategory::Infrastructure,
        ExclusionCategory::SeismicFault,
        ExclusionCategory::Airport,
        ExclusionCategory::ProtectedArea,
        ExclusionCategory::Forest,
        ExclusionCategory::WaterStress,
        ExclusionCategory::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionCategory::Settlement => "settlement",
            ExclusionCategory::Infrastructure => "infrastructure",
            ExclusionCategory::SeismicFault => "seismic_fault",
            ExclusionCategory::Airport => "airport",
            ExclusionCategory::ProtectedArea => "protected_area",
            ExclusionCategory::Forest => "forest",
            ExclusionCategory::WaterStress => "water_stress",
            ExclusionCategory::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }

    /// Buffer applied when a manifest entry omits `buffer_m`.
    pub fn default_buffer_m(self) -> f64 {
        match self {
            ExclusionCategory::Settlement => 2000.0,
            ExclusionCategory::SeismicFault => 200.0,
            ExclusionCategory::Airport => 20_000.0,
            _ => 0.0,
        }
    }

    /// Settlements and faults stay excluded even when caverns are reached by horizontal drilling.
    pub fn always_hard(self) -> bool {
        matches!(
            self,
            ExclusionCategory::Settlement | ExclusionCategory::SeismicFault
        )
    }
}

impl fmt::Display for ExclusionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionLayer {
    pub category: ExclusionCategory,
    pub geometry_path: PathBuf,
    pub buffer_m: f64,
    pub applies_in_horizontal_mode: bool,
}
