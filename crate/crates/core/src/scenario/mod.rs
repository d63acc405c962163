//! Scenario configuration and the end-to-end pipeline.

mod artifacts;
mod diff;

pub use artifacts::{
    map_values, read_summary, write_artifacts, CountryRow, DepositSummary, MapQuantity, RunMetadata,
    Summary, ARTIFACT_FILES,
};
pub use diff::{diff_scenarios, CountryDelta, DiffReport};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::capacity::{aggregate_capacity, cavern_capacity, CapacityTable, CompressibilityTable, Grouping, ThermoParams};
use crate::eligibility::{eligible_area_km2, evaluate_deposit, Drilling, DrillingMode, EligibilityRaster, LoadedLayer};
use crate::energy_system::{
    balanced_demand_share, country_ledger, mark_region_sufficiency, regional_sufficiency, storage_abroad,
    sufficient_country_count, ShareMode, SharingPlan, SufficiencyLedger,
};
use crate::error::{Error, Result};
use crate::geodata_io::{
    build_local_grid, load_demand, load_deposits, load_exclusion_manifest, load_regions, load_shapes, DemandTable,
    RegionMap, SaltDeposit,
};
use crate::geology::{classify_all, select_case, GeologyCase, Suitability, SuitabilityCriteria};
use crate::placement::{assign_depth, pack_caverns, CavernPlacement, CavernSpec, SeparationFactor};

/// Relative input paths resolve against this directory when it is set.
pub const DATA_DIR_ENV: &str = "SALTCAV_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub deposits: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclusions: Option<PathBuf>,
    pub demand: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<PathBuf>,
    /// Replaces the shipped hydrogen Z table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_table: Option<PathBuf>,
}

impl InputPaths {
    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.deposits);
        fix(&mut self.demand);
        for p in [&mut self.exclusions, &mut self.regions, &mut self.z_table].into_iter().flatten() {
            fix(p);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub geology_case: GeologyCase,
    #[serde(default)]
    pub separation_factor: SeparationFactor,
    #[serde(default)]
    pub drilling: Drilling,
    #[serde(default = "default_reach")]
    pub horizontal_reach_m: f64,
    #[serde(default = "default_resolution")]
    pub resolution_m: f64,
    #[serde(default = "default_fraction")]
    pub storage_fraction: f64,
    #[serde(default)]
    pub criteria: SuitabilityCriteria,
    #[serde(default)]
    pub thermo: ThermoParams,
    pub inputs: InputPaths,
    /// Closed list of region names the region file may use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_regions: Option<Vec<String>>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Thread count; `None` uses all available cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Also write per-deposit eligibility masks as PGM images.
    #[serde(default)]
    pub debug_masks: bool,
}

fn default_reach() -> f64 {
    DrillingMode::DEFAULT_REACH_M
}

fn default_resolution() -> f64 {
    100.0
}

fn default_fraction() -> f64 {
    0.10
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ScenarioConfig {
    /// Defaults for everything but the two mandatory inputs.
    pub fn new(deposits: PathBuf, demand: PathBuf) -> Self {
        ScenarioConfig {
            geology_case: GeologyCase::default(),
            separation_factor: SeparationFactor::default(),
            drilling: Drilling::default(),
            horizontal_reach_m: default_reach(),
            resolution_m: default_resolution(),
            storage_fraction: default_fraction(),
            criteria: SuitabilityCriteria::default(),
            thermo: ThermoParams::default(),
            inputs: InputPaths {
                deposits,
                exclusions: None,
                demand,
                regions: None,
                z_table: None,
            },
            declared_regions: None,
            out_dir: default_out_dir(),
            workers: None,
            debug_masks: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json {
            path: "<config>".into(),
            source: e,
        })
    }

    /// Reads a config file. Relative input paths resolve against `$SALTCAV_DATA_DIR`
    /// when set, else against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ScenarioConfig = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.into(),
            source: e,
        })?;
        let base = data_dir().unwrap_or_else(|| path.parent().map(Path::to_path_buf).unwrap_or_default());
        cfg.inputs.resolve(&base);
        Ok(cfg)
    }

    pub fn resolve_inputs(&mut self, base: &Path) {
        self.inputs.resolve(base);
    }

    pub fn drilling_mode(&self) -> DrillingMode {
        DrillingMode {
            drilling: self.drilling,
            reach_m: self.horizontal_reach_m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resolution_m > 0.0 && self.resolution_m.is_finite()) {
            return Err(Error::Validation(format!("resolution_m must be positive, got {}", self.resolution_m)));
        }
        if !(self.storage_fraction > 0.0 && self.storage_fraction <= 1.0) {
            return Err(Error::Validation(format!(
                "storage_fraction must lie in (0, 1], got {}",
                self.storage_fraction
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::Validation("workers must be at least 1".into()));
        }
        self.drilling_mode().validate()?;
        self.criteria.validate()?;
        self.thermo.validate()
    }
}

pub fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Everything a run reads, loaded and checked.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub deposits: Vec<SaltDeposit>,
    pub layers: Vec<LoadedLayer>,
    pub demand: DemandTable,
    pub regions: RegionMap,
    pub z_table: CompressibilityTable,
    /// SHA-256 of every input file, keyed by role.
    pub dataset_hashes: BTreeMap<String, String>,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn load_inputs(cfg: &ScenarioConfig) -> Result<Inputs> {
    let p = &cfg.inputs;
    let named = [
        ("deposits", Some(&p.deposits)),
        ("exclusions", p.exclusions.as_ref()),
        ("demand", Some(&p.demand)),
        ("regions", p.regions.as_ref()),
        ("z_table", p.z_table.as_ref()),
    ];
    for (role, path) in named {
        if let Some(path) = path.filter(|path| !path.is_file()) {
            return Err(Error::Validation(format!("{role} input {} does not exist", path.display())));
        }
    }
    let mut hashes = BTreeMap::new();
    let deposits = load_deposits(&p.deposits).map_err(|e| e.at_stage("load", "deposits"))?;
    hashes.insert("deposits".to_string(), sha256_file(&p.deposits)?);
    let mut layers = Vec::new();
    if let Some(manifest) = &p.exclusions {
        let entries = load_exclusion_manifest(manifest).map_err(|e| e.at_stage("load", "exclusion manifest"))?;
        hashes.insert("exclusions".to_string(), sha256_file(manifest)?);
        for (i, layer) in entries.into_iter().enumerate() {
            let shapes = load_shapes(&layer.geometry_path)
                .map_err(|e| e.at_stage("load", format!("exclusion layer {}", layer.category)))?;
            hashes.insert(format!("exclusions[{i}].{}", layer.category), sha256_file(&layer.geometry_path)?);
            layers.push(LoadedLayer { layer, shapes });
        }
    }
    let demand = load_demand(&p.demand).map_err(|e| e.at_stage("load", "demand"))?;
    hashes.insert("demand".to_string(), sha256_file(&p.demand)?);
    let regions = match &p.regions {
        Some(path) => {
            hashes.insert("regions".to_string(), sha256_file(path)?);
            load_regions(path, cfg.declared_regions.as_deref()).map_err(|e| e.at_stage("load", "regions"))?
        }
        None => RegionMap::default(),
    };
    let z_table = match &p.z_table {
        Some(path) => {
            hashes.insert("z_table".to_string(), sha256_file(path)?);
            CompressibilityTable::load(path).map_err(|e| e.at_stage("load", "z table"))?
        }
        None => CompressibilityTable::hydrogen(),
    };
    Ok(Inputs {
        deposits,
        layers,
        demand,
        regions,
        z_table,
        dataset_hashes: hashes,
    })
}

/// Per-deposit pipeline result.
#[derive(Debug, Clone)]
pub struct DepositOutcome {
    pub deposit_id: String,
    pub country_iso3: String,
    pub suitability: Suitability,
    pub deposit_cells: usize,
    pub eligible_area_km2: f64,
    pub placements: Vec<CavernPlacement>,
    /// Why the deposit yielded no caverns despite eligible land.
    pub rejected: Option<String>,
    pub raster: Option<EligibilityRaster>,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub dataset_hashes: BTreeMap<String, String>,
    pub classified: BTreeMap<Suitability, usize>,
    pub deposits: Vec<DepositOutcome>,
    pub country_capacity: CapacityTable,
    pub countries: SufficiencyLedger,
    pub regions: SufficiencyLedger,
    pub sharing: Vec<SharingPlan>,
    pub share_country_pct: f64,
    pub share_region_pct: f64,
    pub sufficient_countries: (usize, usize),
    pub sufficient_countries_region_mode: (usize, usize),
}

impl ScenarioResult {
    pub fn placements(&self) -> impl Iterator<Item = &CavernPlacement> {
        self.deposits.iter().flat_map(|d| d.placements.iter())
    }
}

/// Grid margin wide enough that every exclusion feature whose buffer reaches the
/// deposit is rasterized.
fn grid_margin(layers: &[LoadedLayer], cell_size_m: f64) -> f64 {
    let buffer = layers.iter().map(|l| l.layer.buffer_m).fold(0.0, f64::max);
    buffer + cell_size_m
}

fn process_deposit(
    deposit: &SaltDeposit,
    suitability: Suitability,
    cfg: &ScenarioConfig,
    inputs: &Inputs,
) -> Result<DepositOutcome> {
    let id = deposit.id.as_str();
    let grid = build_local_grid(deposit, cfg.resolution_m, grid_margin(&inputs.layers, cfg.resolution_m))
        .map_err(|e| e.at_stage("grid", id))?;
    let raster = evaluate_deposit(deposit, &grid, &inputs.layers, &cfg.drilling_mode())
        .map_err(|e| e.at_stage("eligibility", id))?;
    let spec = CavernSpec::for_salt(deposit.salt_type, cfg.separation_factor);
    let packed = pack_caverns(&raster, &spec, deposit);
    let mut rejected = None;
    let mut placements = Vec::with_capacity(packed.len());
    for p in &packed {
        let placed = match assign_depth(p, deposit, &cfg.criteria.depth_window_m) {
            Ok(placed) => placed,
            Err(e @ Error::PlacementRejected { .. }) => {
                log::warn!("{e}");
                rejected = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e.at_stage("placement", id)),
        };
        let gwh = cavern_capacity(&placed, &cfg.thermo, &inputs.z_table)
            .map_err(|e| e.at_stage("capacity", format!("{id}#{}", p.index)))?;
        if gwh > 0.0 {
            placements.push(CavernPlacement {
                index: placements.len(),
                capacity_gwh: Some(gwh),
                ..placed
            });
        } else {
            log::warn!("{id}#{}: non-positive working gas capacity, placement dropped", p.index);
        }
    }
    if rejected.is_some() {
        placements.clear();
    }
    Ok(DepositOutcome {
        deposit_id: deposit.id.clone(),
        country_iso3: deposit.country_iso3.clone(),
        suitability,
        deposit_cells: raster.deposit.count(),
        eligible_area_km2: eligible_area_km2(&raster),
        placements,
        rejected,
        raster: cfg.debug_masks.then_some(raster),
    })
}

/// Runs the pipeline on loaded inputs. No files are written.
pub fn evaluate_scenario(cfg: &ScenarioConfig, inputs: &Inputs) -> Result<ScenarioResult> {
    cfg.validate()?;
    let classified = classify_all(&inputs.deposits, &cfg.criteria);
    let mut counts = BTreeMap::new();
    for c in &classified {
        *counts.entry(c.suitability).or_insert(0) += 1;
    }
    let selected = select_case(&classified, cfg.geology_case, &cfg.criteria);
    let suitability: BTreeMap<&str, Suitability> =
        classified.iter().map(|c| (c.deposit.id.as_str(), c.suitability)).collect();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Runtime(format!("cannot start worker pool: {e}")))?;
    let outcomes = pool.install(|| {
        selected
            .par_iter()
            .map(|d| process_deposit(d, suitability[d.id.as_str()], cfg, inputs))
            .collect::<Result<Vec<_>>>()
    })?;

    let placements: Vec<CavernPlacement> = outcomes.iter().flat_map(|o| o.placements.iter().cloned()).collect();
    let country_capacity = aggregate_capacity(&placements, Grouping::Country)?;
    let mut countries = country_ledger(&country_capacity, &inputs.demand, cfg.storage_fraction)?;
    let regions = regional_sufficiency(&countries, &inputs.regions)?;
    mark_region_sufficiency(&mut countries, &regions, &inputs.regions);
    let sharing = storage_abroad(&countries, &inputs.regions);
    let share_country_pct = balanced_demand_share(&countries, ShareMode::Country)?;
    let share_region_pct = balanced_demand_share(&countries, ShareMode::Region)?;
    Ok(ScenarioResult {
        config: cfg.clone(),
        dataset_hashes: inputs.dataset_hashes.clone(),
        classified: counts,
        deposits: outcomes,
        country_capacity,
        sufficient_countries: sufficient_country_count(&countries, ShareMode::Country),
        sufficient_countries_region_mode: sufficient_country_count(&countries, ShareMode::Region),
        countries,
        regions,
        sharing,
        share_country_pct,
        share_region_pct,
    })
}

/// Loads inputs, runs the pipeline and writes all artifacts to `cfg.out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let inputs = load_inputs(cfg)?;
    let result = evaluate_scenario(cfg, &inputs)?;
    write_artifacts(&result, &cfg.out_dir).map_err(|e| e.at_stage("output", cfg.out_dir.display().to_string()))?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub deposits: usize,
    pub classified: BTreeMap<Suitability, usize>,
    pub exclusion_layers: usize,
    pub exclusion_features: usize,
    pub demand_countries: usize,
    pub region_assignments: usize,
    pub dataset_hashes: BTreeMap<String, String>,
}

/// Loads and checks every input without running the pipeline. Also builds each
/// selected deposit's grid so oversized deposits are reported up front.
pub fn validate_inputs(cfg: &ScenarioConfig) -> Result<ValidationReport> {
    cfg.validate()?;
    let inputs = load_inputs(cfg)?;
    let classified = classify_all(&inputs.deposits, &cfg.criteria);
    let mut counts = BTreeMap::new();
    for c in &classified {
        *counts.entry(c.suitability).or_insert(0) += 1;
    }
    let margin = grid_margin(&inputs.layers, cfg.resolution_m);
    for d in select_case(&classified, cfg.geology_case, &cfg.criteria) {
        build_local_grid(&d, cfg.resolution_m, margin).map_err(|e| e.at_stage("grid", d.id.clone()))?;
    }
    Ok(ValidationReport {
        deposits: inputs.deposits.len(),
        classified: counts,
        exclusion_layers: inputs.layers.len(),
        exclusion_features: inputs.layers.iter().map(|l| l.shapes.len()).sum(),
        demand_countries: inputs.demand.rows.len(),
        region_assignments: inputs.regions.members.len(),
        dataset_hashes: inputs.dataset_hashes,
    })
}
