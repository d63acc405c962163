use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{ExclusionCategory, ExclusionLayer};
use crate::error::{Error, Result};

/// Annual electricity demand per country, keyed by ISO3 code.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DemandTable {
    pub rows: BTreeMap<String, f64>,
}

impl DemandTable {
    pub fn from_rows(rows: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (iso3, twh) in rows {
            if !(twh >= 0.0 && twh.is_finite()) {
                return Err(Error::Validation(format!(
                    "demand for {iso3} must be a non-negative number, got {twh}"
                )));
            }
            if map.insert(iso3.clone(), twh).is_some() {
                return Err(Error::Validation(format!("duplicate country {iso3} in demand table")));
            }
        }
        Ok(DemandTable { rows: map })
    }

    pub fn total_twh(&self) -> f64 {
        self.rows.values().sum()
    }
}

#[derive(Debug, Deserialize)]
struct DemandRow {
    country_iso3: String,
    #[serde(alias = "annual_electricity_demand_TWh")]
    annual_electricity_demand_twh: f64,
}

pub fn load_demand(path: &Path) -> Result<DemandTable> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Csv {
        path: path.into(),
        source: e,
    })?;
    let rows = reader
        .deserialize::<DemandRow>()
        .map(|r| {
            r.map(|r| (r.country_iso3, r.annual_electricity_demand_twh))
                .map_err(|e| Error::Csv {
                    path: path.into(),
                    source: e,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    DemandTable::from_rows(rows)
}

/// Country → region assignment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegionMap {
    pub members: BTreeMap<String, String>,
}

impl RegionMap {
    /// `declared`, when given, is the closed list region names must come from.
    pub fn from_rows(
        rows: impl IntoIterator<Item = (String, String)>,
        declared: Option<&[String]>,
    ) -> Result<Self> {
        let declared: Option<BTreeSet<&str>> = declared.map(|d| d.iter().map(String::as_str).collect());
        let mut members = BTreeMap::new();
        for (iso3, region) in rows {
            if let Some(d) = &declared {
                if !d.contains(region.as_str()) {
                    return Err(Error::Validation(format!(
                        "region {region:?} for {iso3} is not in the declared region list"
                    )));
                }
            }
            if members.insert(iso3.clone(), region).is_some() {
                return Err(Error::Validation(format!("country {iso3} assigned to more than one region")));
            }
        }
        Ok(RegionMap { members })
    }

    pub fn region_of(&self, iso3: &str) -> Option<&str> {
        self.members.get(iso3).map(String::as_str)
    }
}

#[derive(Debug, Deserialize)]
struct RegionRow {
    country_iso3: String,
    region_name: String,
}

pub fn load_regions(path: &Path, declared: Option<&[String]>) -> Result<RegionMap> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Csv {
        path: path.into(),
        source: e,
    })?;
    let rows = reader
        .deserialize::<RegionRow>()
        .map(|r| {
            r.map(|r| (r.country_iso3, r.region_name)).map_err(|e| Error::Csv {
                path: path.into(),
                source: e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RegionMap::from_rows(rows, declared)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    category: String,
    path: PathBuf,
    buffer_m: Option<f64>,
    applies_in_horizontal_mode: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Manifest {
    Wrapped { layers: Vec<ManifestEntry> },
    Bare(Vec<ManifestEntry>),
}

pub fn load_exclusion_manifest(path: &Path) -> Result<Vec<ExclusionLayer>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_exclusion_manifest(&text, base).map_err(|e| match e {
        Error::Json { source, .. } => Error::Json {
            path: path.into(),
            source,
        },
        other => other,
    })
}

/// Parses a manifest; relative layer paths resolve against `base_dir`.
pub fn parse_exclusion_manifest(text: &str, base_dir: &Path) -> Result<Vec<ExclusionLayer>> {
    let manifest: Manifest = serde_json::from_str(text).map_err(|e| Error::Json {
        path: "<manifest>".into(),
        source: e,
    })?;
    let entries = match manifest {
        Manifest::Wrapped { layers } => layers,
        Manifest::Bare(layers) => layers,
    };
    entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let category = ExclusionCategory::parse(&e.category).ok_or_else(|| {
                Error::Validation(format!("manifest entry {i}: unknown category {:?}", e.category))
            })?;
            let buffer_m = e.buffer_m.unwrap_or_else(|| category.default_buffer_m());
            if !(buffer_m >= 0.0 && buffer_m.is_finite()) {
                return Err(Error::Validation(format!(
                    "manifest entry {i} ({category}): buffer_m must be >= 0, got {buffer_m}"
                )));
            }
            let applies_in_horizontal_mode = match e.applies_in_horizontal_mode {
                Some(false) if category.always_hard() => {
                    return Err(Error::Validation(format!(
                        "manifest entry {i}: {category} layers always apply in horizontal mode"
                    )))
                }
                Some(flag) => flag,
                None => category.always_hard(),
            };
            let geometry_path = if e.path.is_absolute() {
                e.path
            } else {
                base_dir.join(e.path)
            };
            Ok(ExclusionLayer {
                category,
                geometry_path,
                buffer_m,
                applies_in_horizontal_mode,
            })
        })
        .collect()
}
