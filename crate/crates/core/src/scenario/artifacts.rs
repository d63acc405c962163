//! Run artifacts: placements GeoJSON, country and region CSVs, summary and metadata.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::ScenarioResult;
use crate::error::{Error, Result};

pub const ARTIFACT_FILES: [&str; 5] = [
    "placements.geojson",
    "countries.csv",
    "regions.csv",
    "summary.json",
    "metadata.json",
];

fn round3(x: f64) -> f64 {
    let r = (x * 1000.0).round() / 1000.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn round7(x: f64) -> f64 {
    (x * 1e7).round() / 1e7
}

fn fmt3(x: f64) -> String {
    format!("{:.3}", round3(x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepositSummary {
    pub id: String,
    pub country_iso3: String,
    pub suitability: crate::geology::Suitability,
    pub eligible_area_km2: f64,
    pub placements: usize,
    pub capacity_twh: f64,
    #[serde(default)]
    pub rejected: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total_capacity_twh: f64,
    pub placements: usize,
    pub deposits_total: usize,
    pub deposits_selected: usize,
    pub deposits_rejected: usize,
    pub classified: BTreeMap<String, usize>,
    pub total_demand_twh: f64,
    pub total_need_twh: f64,
    pub balanced_share_country_pct: f64,
    pub balanced_share_region_pct: f64,
    pub sufficient_countries: usize,
    pub sufficient_countries_region_mode: usize,
    pub counted_countries: usize,
    pub storage_abroad_twh: f64,
    pub storage_abroad_by_region: BTreeMap<String, f64>,
    pub country_capacity_twh: BTreeMap<String, f64>,
    pub deposits: Vec<DepositSummary>,
}

impl Summary {
    pub fn from_result(r: &ScenarioResult) -> Self {
        let deposits: Vec<DepositSummary> = r
            .deposits
            .iter()
            .map(|d| DepositSummary {
                id: d.deposit_id.clone(),
                country_iso3: d.country_iso3.clone(),
                suitability: d.suitability,
                eligible_area_km2: round3(d.eligible_area_km2),
                placements: d.placements.len(),
                capacity_twh: round3(d.placements.iter().filter_map(|p| p.capacity_gwh).sum::<f64>() / 1000.0),
                rejected: d.rejected.clone(),
            })
            .collect();
        Summary {
            total_capacity_twh: round3(r.country_capacity.total_twh()),
            placements: r.placements().count(),
            deposits_total: r.classified.values().sum(),
            deposits_selected: r.deposits.len(),
            deposits_rejected: r.deposits.iter().filter(|d| d.rejected.is_some()).count(),
            classified: r
                .classified
                .iter()
                .map(|(s, n)| (serde_json::to_value(s).unwrap().as_str().unwrap_or_default().to_string(), *n))
                .collect(),
            total_demand_twh: round3(r.countries.total_demand_twh()),
            total_need_twh: round3(r.countries.total_need_twh()),
            balanced_share_country_pct: round3(r.share_country_pct),
            balanced_share_region_pct: round3(r.share_region_pct),
            sufficient_countries: r.sufficient_countries.0,
            sufficient_countries_region_mode: r.sufficient_countries_region_mode.0,
            counted_countries: r.sufficient_countries.1,
            storage_abroad_twh: round3(r.sharing.iter().map(|p| p.storage_abroad_twh).sum()),
            storage_abroad_by_region: r
                .sharing
                .iter()
                .map(|p| (p.region.clone(), round3(p.storage_abroad_twh)))
                .collect(),
            country_capacity_twh: r.country_capacity.groups.iter().map(|(k, v)| (k.clone(), round3(*v))).collect(),
            deposits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool: String,
    pub version: String,
    /// Effective configuration, minus the output directory and worker count.
    pub config: Value,
    pub dataset_hashes: BTreeMap<String, String>,
    pub z_table: String,
}

impl RunMetadata {
    pub fn from_result(r: &ScenarioResult) -> Self {
        let mut config = serde_json::to_value(&r.config).expect("config serializes");
        if let Value::Object(map) = &mut config {
            map.remove("out_dir");
            map.remove("workers");
        }
        RunMetadata {
            tool: "saltcav".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            dataset_hashes: r.dataset_hashes.clone(),
            z_table: if r.config.inputs.z_table.is_some() {
                "file".into()
            } else {
                "builtin hydrogen".into()
            },
        }
    }
}

/// One row of `countries.csv` as read back.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryRow {
    pub iso3: String,
    pub potential_twh: f64,
    pub need_twh: f64,
    pub demand_twh: f64,
    /// `None` for unbounded or undefined sufficiency.
    pub sufficiency_pct: Option<f64>,
    pub sufficiency_text: String,
    pub self_sufficient: bool,
    pub region_sufficient: bool,
}

fn placements_geojson(r: &ScenarioResult) -> Value {
    let features: Vec<Value> = r
        .placements()
        .map(|p| {
            json!({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [round7(p.lon), round7(p.lat)]},
                "properties": {
                    "deposit_id": p.deposit_id,
                    "index": p.index,
                    "country_iso3": p.country_iso3,
                    "salt_type": p.spec.shape.as_str(),
                    "row": p.row,
                    "col": p.col,
                    "separation_m": round3(p.spec.separation_m()),
                    "cavern_top_depth_m": p.cavern_top_depth_m.map(round3),
                    "capacity_gwh": p.capacity_gwh.map(round3),
                }
            })
        })
        .collect();
    json!({"type": "FeatureCollection", "features": features})
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Csv {
        path: "<output>".into(),
        source: e,
    };
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Runtime(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn countries_csv(r: &ScenarioResult) -> Result<String> {
    csv_text(
        &[
            "iso3",
            "potential_TWh",
            "need_TWh",
            "demand_TWh",
            "sufficiency_pct",
            "self_sufficient",
            "region_sufficient",
            "no_potential",
        ],
        r.countries.entries.iter().map(|(iso3, e)| {
            vec![
                iso3.clone(),
                fmt3(e.potential_twh),
                fmt3(e.need_twh),
                fmt3(e.demand_twh),
                e.sufficiency.format_percent(3),
                flag(e.flags.self_sufficient),
                flag(e.flags.region_sufficient),
                flag(e.flags.no_potential),
            ]
        }),
    )
}

fn regions_csv(r: &ScenarioResult) -> Result<String> {
    let abroad: BTreeMap<&str, &crate::energy_system::SharingPlan> =
        r.sharing.iter().map(|p| (p.region.as_str(), p)).collect();
    csv_text(
        &[
            "region",
            "potential_TWh",
            "need_TWh",
            "sufficiency_pct",
            "storage_abroad_TWh",
            "donors",
            "recipients",
        ],
        r.regions.entries.iter().map(|(region, e)| {
            let plan = abroad.get(region.as_str());
            vec![
                region.clone(),
                fmt3(e.potential_twh),
                fmt3(e.need_twh),
                e.sufficiency.format_percent(3),
                fmt3(plan.map_or(0.0, |p| p.storage_abroad_twh)),
                plan.map_or(String::new(), |p| p.donors.join(";")),
                plan.map_or(String::new(), |p| p.recipients.join(";")),
            ]
        }),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(path, e))
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifact serializes");
    s.push('\n');
    s
}

fn mask_file_name(id: &str) -> String {
    let safe: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    format!("{safe}.pgm")
}

pub fn write_artifacts(r: &ScenarioResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(dir, "placements.geojson", &pretty(&placements_geojson(r)))?;
    write(dir, "countries.csv", &countries_csv(r)?)?;
    write(dir, "regions.csv", &regions_csv(r)?)?;
    write(dir, "summary.json", &pretty(&Summary::from_result(r)))?;
    write(dir, "metadata.json", &pretty(&RunMetadata::from_result(r)))?;
    let rasters: Vec<_> = r.deposits.iter().filter_map(|d| d.raster.as_ref().map(|m| (d, m))).collect();
    if !rasters.is_empty() {
        let masks = dir.join("masks");
        fs::create_dir_all(&masks).map_err(|e| Error::io(&masks, e))?;
        for (d, raster) in rasters {
            let path = masks.join(mask_file_name(&d.deposit_id));
            let mut buf = Vec::new();
            raster.mask.write_pgm(&mut buf).map_err(|e| Error::io(&path, e))?;
            fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })
}

pub fn read_summary(dir: &Path) -> Result<Summary> {
    read_json(&dir.join("summary.json"))
}

pub(crate) fn read_metadata(dir: &Path) -> Result<RunMetadata> {
    read_json(&dir.join("metadata.json"))
}

fn parse_sufficiency(s: &str) -> Option<f64> {
    s.parse().ok()
}

pub(crate) fn read_country_rows(dir: &Path) -> Result<Vec<CountryRow>> {
    let path = dir.join("countries.csv");
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.clone(),
        source: e,
    };
    let mut reader = csv::Reader::from_path(&path).map_err(csv_err)?;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Validation(format!("{}: malformed row {:?}", path.display(), rec)))
        };
        let text = rec.get(4).unwrap_or_default().to_string();
        rows.push(CountryRow {
            iso3: rec.get(0).unwrap_or_default().to_string(),
            potential_twh: num(1)?,
            need_twh: num(2)?,
            demand_twh: num(3)?,
            sufficiency_pct: parse_sufficiency(&text),
            sufficiency_text: text,
            self_sufficient: rec.get(5) == Some("1"),
            region_sufficient: rec.get(6) == Some("1"),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapQuantity {
    CapacityTwh,
    NeedTwh,
    SufficiencyPct,
}

impl MapQuantity {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "capacity" | "capacity_twh" => Some(MapQuantity::CapacityTwh),
            "need" | "need_twh" => Some(MapQuantity::NeedTwh),
            "sufficiency" | "sufficiency_pct" => Some(MapQuantity::SufficiencyPct),
            _ => None,
        }
    }

    fn column(self) -> &'static str {
        match self {
            MapQuantity::CapacityTwh => "capacity_TWh",
            MapQuantity::NeedTwh => "need_TWh",
            MapQuantity::SufficiencyPct => "sufficiency_pct",
        }
    }
}

/// Per-country values from a finished run as a two-column CSV for mapping tools.
pub fn map_values(dir: &Path, quantity: MapQuantity) -> Result<String> {
    let rows = read_country_rows(dir)?;
    csv_text(
        &["iso3", quantity.column()],
        rows.into_iter().map(|r| {
            let v = match quantity {
                MapQuantity::CapacityTwh => fmt3(r.potential_twh),
                MapQuantity::NeedTwh => fmt3(r.need_twh),
                MapQuantity::SufficiencyPct => r.sufficiency_text,
            };
            vec![r.iso3, v]
        }),
    )
}
