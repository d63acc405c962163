#![allow(dead_code)]

pub mod oracles;

use std::fs;
use std::path::{Path, PathBuf};

use saltcav_core::eligibility::LoadedLayer;
use saltcav_core::geometry::{MultiPolygon, Polygon, Shape};
use saltcav_core::{
    DepthInterval, ExclusionCategory, ExclusionLayer, LocalGrid, SaltDeposit, SaltType, ScenarioConfig, SuitabilityHint,
};
use serde_json::{json, Value};

pub const KM_PER_DEG_LAT: f64 = 111.194_926_644_558_73;

/// Lon/lat offset from `origin` by (east, north) kilometers.
pub fn offset(origin: [f64; 2], east_km: f64, north_km: f64) -> [f64; 2] {
    let lat0 = origin[1].to_radians();
    [
        origin[0] + east_km / (KM_PER_DEG_LAT * lat0.cos()),
        origin[1] + north_km / KM_PER_DEG_LAT,
    ]
}

/// Closed lon/lat ring of a `w_km` × `h_km` rectangle with south-west corner `sw`.
pub fn rect_ring(sw: [f64; 2], w_km: f64, h_km: f64) -> Vec<[f64; 2]> {
    let ne = offset(sw, w_km, h_km);
    vec![sw, [ne[0], sw[1]], ne, [sw[0], ne[1]], sw]
}

pub fn deposit_feature(id: &str, ring: Vec<[f64; 2]>, area_km2: f64, props: Value) -> Value {
    let mut p = json!({
        "id": id,
        "name": id,
        "area_km2": area_km2,
    });
    p.as_object_mut()
        .unwrap()
        .extend(props.as_object().unwrap().clone());
    json!({
        "type": "Feature",
        "geometry": {"type": "Polygon", "coordinates": [ring]},
        "properties": p
    })
}

pub fn collection(features: Vec<Value>) -> String {
    serde_json::to_string_pretty(&json!({"type": "FeatureCollection", "features": features})).unwrap()
}

pub const DE_SW: [f64; 2] = [10.0, 52.0];
pub const NL_SW: [f64; 2] = [6.0, 53.0];

/// Two guaranteed deposits (DEU domal, NLD bedded), one partial (POL), one unsuitable
/// (DNK), three exclusion layers over the DEU deposit, demand for six countries in two
/// regions.
pub fn write_fixture(dir: &Path) -> ScenarioConfig {
    let deposits = collection(vec![
        deposit_feature(
            "DE-A",
            rect_ring(DE_SW, 10.0, 10.0),
            100.0,
            json!({"salt_type": "domal", "depth_top_m": [600.0, 1800.0], "thickness_m": 900.0,
                   "insoluble_fraction": 0.1, "country_iso3": "DEU"}),
        ),
        deposit_feature(
            "NL-B",
            rect_ring(NL_SW, 6.0, 5.0),
            30.0,
            json!({"salt_type": "bedded", "depth_top_m": [700.0, 1000.0], "thickness_m": 250.0,
                   "insoluble_fraction": 0.2, "country_iso3": "NLD"}),
        ),
        deposit_feature(
            "PL-C",
            rect_ring([18.0, 52.5], 4.0, 5.0),
            20.0,
            json!({"salt_type": "bedded", "depth_top_m": [900.0, 1400.0], "thickness_m": null,
                   "insoluble_fraction": 0.1, "country_iso3": "POL"}),
        ),
        deposit_feature(
            "DK-D",
            rect_ring([9.0, 56.0], 5.0, 5.0),
            25.0,
            json!({"salt_type": "domal", "depth_top_m": [2200.0, 3000.0], "thickness_m": 800.0,
                   "insoluble_fraction": 0.05, "country_iso3": "DNK"}),
        ),
    ]);
    fs::write(dir.join("deposits.geojson"), deposits).unwrap();

    let settlement = offset(DE_SW, 3.05, 6.05);
    let fault = vec![offset(DE_SW, -1.0, 2.0), offset(DE_SW, 11.0, 3.5)];
    let protected = rect_ring(offset(DE_SW, 7.0, -1.0), 5.0, 12.0);
    fs::create_dir_all(dir.join("layers")).unwrap();
    fs::write(
        dir.join("layers/settlements.geojson"),
        collection(vec![json!({"type": "Feature", "properties": {},
            "geometry": {"type": "Point", "coordinates": settlement}})]),
    )
    .unwrap();
    fs::write(
        dir.join("layers/faults.geojson"),
        collection(vec![json!({"type": "Feature", "properties": {},
            "geometry": {"type": "LineString", "coordinates": fault}})]),
    )
    .unwrap();
    fs::write(
        dir.join("layers/protected.geojson"),
        collection(vec![json!({"type": "Feature", "properties": {},
            "geometry": {"type": "Polygon", "coordinates": [protected]}})]),
    )
    .unwrap();
    fs::write(
        dir.join("exclusions.json"),
        serde_json::to_string_pretty(&json!({"layers": [
            {"category": "settlement", "path": "layers/settlements.geojson"},
            {"category": "seismic_fault", "path": "layers/faults.geojson"},
            {"category": "protected_area", "path": "layers/protected.geojson", "buffer_m": 0.0}
        ]}))
        .unwrap(),
    )
    .unwrap();

    fs::write(
        dir.join("demand.csv"),
        "country_iso3,annual_electricity_demand_twh\nDEU,500\nNLD,110\nPOL,170\nDNK,35\nFRA,450\nUSA,4000\n",
    )
    .unwrap();
    fs::write(
        dir.join("regions.csv"),
        "country_iso3,region_name\nDEU,Europe\nNLD,Europe\nPOL,Europe\nDNK,Europe\nFRA,Europe\nUSA,North America\n",
    )
    .unwrap();

    let config = json!({
        "inputs": {
            "deposits": "deposits.geojson",
            "exclusions": "exclusions.json",
            "demand": "demand.csv",
            "regions": "regions.csv"
        },
        "out_dir": dir.join("out").to_str().unwrap()
    });
    fs::write(dir.join("scenario.json"), serde_json::to_string_pretty(&config).unwrap()).unwrap();
    let mut cfg = ScenarioConfig::from_json(&config.to_string()).unwrap();
    cfg.resolve_inputs(dir);
    cfg
}

/// Rows of the appendix table: region, capacity partial+guaranteed, capacity guaranteed,
/// sufficiency partial+guaranteed, sufficiency guaranteed.
pub fn regional_table() -> Vec<(String, [f64; 4])> {
    include_str!("../fixtures/regional_potentials.tsv")
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            let n = |i: usize| cols[i].trim().parse::<f64>().unwrap();
            (cols[0].to_string(), [n(1), n(2), n(3), n(4)])
        })
        .collect()
}

pub fn open(ring: &[[f64; 2]]) -> Vec<[f64; 2]> {
    ring[..ring.len() - 1].to_vec()
}

pub fn deposit(
    id: &str,
    ring: &[[f64; 2]],
    area_km2: f64,
    salt: SaltType,
    depth: (f64, f64),
    country: &str,
) -> SaltDeposit {
    let geometry = MultiPolygon(vec![Polygon::new(open(ring), vec![])]);
    SaltDeposit {
        id: id.into(),
        name: id.into(),
        geometry,
        area_km2,
        salt_type: salt,
        depth_top_m: Some(DepthInterval::new(depth.0, depth.1)),
        thickness_m: Some(depth.1 - depth.0),
        insoluble_fraction: Some(0.1),
        suitability_hint: SuitabilityHint::Unknown,
        country_iso3: country.into(),
    }
}

pub fn layer(category: ExclusionCategory, shapes: Vec<Shape>, buffer_m: f64) -> LoadedLayer {
    LoadedLayer {
        layer: ExclusionLayer {
            category,
            geometry_path: PathBuf::from(format!("{category}.geojson")),
            buffer_m,
            applies_in_horizontal_mode: category.always_hard(),
        },
        shapes,
    }
}

/// Shapes in the grid's projected frame.
pub fn projected(grid: &LocalGrid, shapes: &[Shape]) -> Vec<Shape> {
    let proj = grid.projection;
    shapes.iter().map(|s| s.map_coords(|c| proj.forward(c))).collect()
}
