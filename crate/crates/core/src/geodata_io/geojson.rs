//! GeoJSON (RFC 7946) readers and writers for deposits and exclusion layers.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::{DepthInterval, SaltDeposit, SaltType, SuitabilityHint};
use crate::error::{Error, Result};
use crate::geometry::{ring_self_intersection, Coord, LocalProjection, MultiPolygon, Polygon, Shape};

/// Tolerated relative mismatch between `area_km2` and the polygon area.
const AREA_TOLERANCE: f64 = 0.05;

pub fn load_deposits(path: &Path) -> Result<Vec<SaltDeposit>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_deposits(&text, &path.display().to_string())
}

/// Parses a deposit FeatureCollection. `source` labels error messages.
pub fn parse_deposits(text: &str, source: &str) -> Result<Vec<SaltDeposit>> {
    let features = parse_features(text, source)?;
    let mut deposits = Vec::with_capacity(features.len());
    for (index, feature) in features.iter().enumerate() {
        deposits.push(parse_deposit(feature, index, source)?);
    }
    let mut seen = std::collections::HashSet::new();
    for (index, d) in deposits.iter().enumerate() {
        if !seen.insert(d.id.as_str()) {
            return Err(Error::Schema {
                path: source.to_string(),
                index,
                feature: d.id.clone(),
                message: "duplicate deposit id".into(),
            });
        }
    }
    Ok(deposits)
}

fn parse_features(text: &str, source: &str) -> Result<Vec<Value>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Json {
        path: source.into(),
        source: e,
    })?;
    match doc.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => {}
        other => {
            return Err(Error::Validation(format!(
                "{source}: expected a FeatureCollection, found type {other:?}"
            )))
        }
    }
    match doc.get("features") {
        Some(Value::Array(features)) => Ok(features.clone()),
        _ => Err(Error::Validation(format!(
            "{source}: FeatureCollection without a features array"
        ))),
    }
}

struct FeatureCtx<'a> {
    source: &'a str,
    index: usize,
    id: String,
}

impl FeatureCtx<'_> {
    fn schema(&self, message: impl Into<String>) -> Error {
        Error::Schema {
            path: self.source.to_string(),
            index: self.index,
            feature: self.id.clone(),
            message: message.into(),
        }
    }

    fn geometry(&self, message: impl Into<String>) -> Error {
        Error::Geometry {
            path: self.source.to_string(),
            index: self.index,
            feature: self.id.clone(),
            message: message.into(),
        }
    }
}

fn feature_id(feature: &Value, props: &Map<String, Value>) -> Option<String> {
    let id = props.get("id").or_else(|| feature.get("id"))?;
    match id {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn parse_deposit(feature: &Value, index: usize, source: &str) -> Result<SaltDeposit> {
    let empty = Map::new();
    let props = feature
        .get("properties")
        .and_then(Value::as_object)
        .unwrap_or(&empty);
    let ctx = FeatureCtx {
        source,
        index,
        id: feature_id(feature, props).unwrap_or_else(|| format!("#{index}")),
    };
    if feature_id(feature, props).is_none() {
        return Err(ctx.schema("missing required property `id`"));
    }

    let required = |key: &str| props.get(key).ok_or_else(|| ctx.schema(format!("missing required property `{key}`")));
    let number = |key: &str, v: &Value| {
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| ctx.schema(format!("`{key}` must be a finite number")))
    };
    let nullable_number = |key: &str, v: Option<&Value>| match v {
        None | Some(Value::Null) => Ok(None),
        Some(v) => number(key, v).map(Some),
    };

    let salt_type = match required("salt_type")?.as_str() {
        Some("domal") => SaltType::Domal,
        Some("bedded") => SaltType::Bedded,
        _ => return Err(ctx.schema("`salt_type` must be \"domal\" or \"bedded\"")),
    };

    let depth_top_m = match props.get("depth_top_m") {
        None | Some(Value::Null) => {
            log::warn!("{source}: deposit {} has no depth interval, flagged as unknown", ctx.id);
            None
        }
        Some(Value::Array(pair)) if pair.len() == 2 => {
            let min = number("depth_top_m", &pair[0])?;
            let max = number("depth_top_m", &pair[1])?;
            if !(min > 0.0 && max > 0.0 && min <= max) {
                return Err(ctx.schema(format!(
                    "`depth_top_m` [{min}, {max}] must satisfy 0 < min <= max"
                )));
            }
            Some(DepthInterval::new(min, max))
        }
        Some(_) => return Err(ctx.schema("`depth_top_m` must be [min, max] or null")),
    };

    // the key is mandatory, an explicit null records an unexplored value
    let thickness_m = nullable_number("thickness_m", Some(required("thickness_m")?))?;
    if let Some(t) = thickness_m {
        if t <= 0.0 {
            return Err(ctx.schema("`thickness_m` must be positive"));
        }
    }
    let insoluble_fraction = nullable_number("insoluble_fraction", props.get("insoluble_fraction"))?;
    if let Some(phi) = insoluble_fraction {
        if !(0.0..=1.0).contains(&phi) {
            return Err(ctx.schema(format!("`insoluble_fraction` {phi} outside [0, 1]")));
        }
    }
    let area_km2 = number("area_km2", required("area_km2")?)?;
    if area_km2 <= 0.0 {
        return Err(ctx.schema("`area_km2` must be positive"));
    }
    let suitability_hint = match props.get("suitability_hint") {
        None | Some(Value::Null) => SuitabilityHint::Unknown,
        Some(v) => match v.as_str() {
            Some("unknown") => SuitabilityHint::Unknown,
            Some("guaranteed") => SuitabilityHint::Guaranteed,
            Some("partial") => SuitabilityHint::Partial,
            Some("unsuitable") => SuitabilityHint::Unsuitable,
            _ => return Err(ctx.schema("invalid `suitability_hint`")),
        },
    };
    let country_iso3 = required("country_iso3")?
        .as_str()
        .ok_or_else(|| ctx.schema("`country_iso3` must be a string"))?
        .to_string();
    let name = props
        .get("name")
        .and_then(Value::as_str)
        .map(str::to_string)
        .unwrap_or_else(|| ctx.id.clone());

    let geometry = parse_areal_geometry(feature.get("geometry"), &ctx)?;
    for (pi, poly) in geometry.0.iter().enumerate() {
        for (ri, ring) in poly.rings().enumerate() {
            if let Some((a, b)) = ring_self_intersection(ring) {
                return Err(ctx.geometry(format!(
                    "polygon {pi} ring {ri} self-intersects (edges {a} and {b})"
                )));
            }
        }
    }
    let projected = geometry.map_coords({
        let proj = LocalProjection::new(geometry.centroid());
        move |c| proj.forward(c)
    });
    let geom_km2 = projected.area() / 1e6;
    if ((geom_km2 - area_km2) / area_km2).abs() > AREA_TOLERANCE {
        return Err(ctx.schema(format!(
            "`area_km2` = {area_km2} differs from the polygon area {geom_km2:.3} km² by more than 5%"
        )));
    }

    Ok(SaltDeposit {
        id: ctx.id.clone(),
        name,
        geometry,
        salt_type,
        depth_top_m,
        thickness_m,
        insoluble_fraction,
        area_km2,
        suitability_hint,
        country_iso3,
    })
}

fn parse_coord(v: &Value, ctx: &FeatureCtx<'_>) -> Result<Coord> {
    let arr = v
        .as_array()
        .filter(|a| a.len() >= 2)
        .ok_or_else(|| ctx.geometry("position must be an array [lon, lat]"))?;
    let lon = arr[0].as_f64().ok_or_else(|| ctx.geometry("non-numeric longitude"))?;
    let lat = arr[1].as_f64().ok_or_else(|| ctx.geometry("non-numeric latitude"))?;
    if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
        return Err(ctx.geometry(format!("position ({lon}, {lat}) outside WGS84 bounds")));
    }
    Ok([lon, lat])
}

fn parse_coords(v: &Value, ctx: &FeatureCtx<'_>) -> Result<Vec<Coord>> {
    v.as_array()
        .ok_or_else(|| ctx.geometry("expected an array of positions"))?
        .iter()
        .map(|c| parse_coord(c, ctx))
        .collect()
}

/// Closes open rings, drops the repeated closing vertex and consecutive duplicates.
fn normalize_ring(mut ring: Vec<Coord>, ctx: &FeatureCtx<'_>) -> Result<Vec<Coord>> {
    ring.dedup();
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    if ring.len() < 3 {
        return Err(ctx.geometry("ring has fewer than 3 distinct vertices"));
    }
    Ok(ring)
}

fn parse_polygon(v: &Value, ctx: &FeatureCtx<'_>) -> Result<Polygon> {
    let rings = v
        .as_array()
        .filter(|r| !r.is_empty())
        .ok_or_else(|| ctx.geometry("polygon needs at least one ring"))?;
    let mut rings = rings
        .iter()
        .map(|r| parse_coords(r, ctx).and_then(|r| normalize_ring(r, ctx)))
        .collect::<Result<Vec<_>>>()?;
    let exterior = rings.remove(0);
    Ok(Polygon::new(exterior, rings))
}

fn parse_areal_geometry(geom: Option<&Value>, ctx: &FeatureCtx<'_>) -> Result<MultiPolygon> {
    let geom = geom
        .filter(|g| !g.is_null())
        .ok_or_else(|| ctx.geometry("feature has no geometry"))?;
    let coords = geom
        .get("coordinates")
        .ok_or_else(|| ctx.geometry("geometry without coordinates"))?;
    match geom.get("type").and_then(Value::as_str) {
        Some("Polygon") => Ok(MultiPolygon(vec![parse_polygon(coords, ctx)?])),
        Some("MultiPolygon") => {
            let polys = coords
                .as_array()
                .filter(|p| !p.is_empty())
                .ok_or_else(|| ctx.geometry("empty MultiPolygon"))?
                .iter()
                .map(|p| parse_polygon(p, ctx))
                .collect::<Result<Vec<_>>>()?;
            Ok(MultiPolygon(polys))
        }
        other => Err(ctx.geometry(format!("expected Polygon or MultiPolygon, found {other:?}"))),
    }
}

fn collect_shapes(geom: &Value, ctx: &FeatureCtx<'_>, out: &mut Vec<Shape>) -> Result<()> {
    let kind = geom.get("type").and_then(Value::as_str);
    if kind == Some("GeometryCollection") {
        for g in geom
            .get("geometries")
            .and_then(Value::as_array)
            .ok_or_else(|| ctx.geometry("GeometryCollection without geometries"))?
        {
            collect_shapes(g, ctx, out)?;
        }
        return Ok(());
    }
    let coords = geom
        .get("coordinates")
        .ok_or_else(|| ctx.geometry("geometry without coordinates"))?;
    let list = |v: &Value| {
        v.as_array()
            .cloned()
            .ok_or_else(|| ctx.geometry("expected an array"))
    };
    match kind {
        Some("Point") => out.push(Shape::Point(parse_coord(coords, ctx)?)),
        Some("MultiPoint") => {
            for c in list(coords)? {
                out.push(Shape::Point(parse_coord(&c, ctx)?));
            }
        }
        Some("LineString") => out.push(Shape::Line(parse_coords(coords, ctx)?)),
        Some("MultiLineString") => {
            for l in list(coords)? {
                out.push(Shape::Line(parse_coords(&l, ctx)?));
            }
        }
        Some("Polygon") => out.push(Shape::Area(parse_polygon(coords, ctx)?)),
        Some("MultiPolygon") => {
            for p in list(coords)? {
                out.push(Shape::Area(parse_polygon(&p, ctx)?));
            }
        }
        other => return Err(ctx.geometry(format!("unsupported geometry type {other:?}"))),
    }
    Ok(())
}

/// Reads every geometry of an exclusion layer file. Features with null geometry are skipped.
pub fn load_shapes(path: &Path) -> Result<Vec<Shape>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    let features = parse_features(&text, &source)?;
    let mut shapes = Vec::new();
    for (index, feature) in features.iter().enumerate() {
        let empty = Map::new();
        let props = feature.get("properties").and_then(Value::as_object).unwrap_or(&empty);
        let ctx = FeatureCtx {
            source: &source,
            index,
            id: feature_id(feature, props).unwrap_or_else(|| format!("#{index}")),
        };
        match feature.get("geometry") {
            None | Some(Value::Null) => continue,
            Some(g) => collect_shapes(g, &ctx, &mut shapes)?,
        }
    }
    Ok(shapes)
}

fn ring_json(ring: &[Coord]) -> Value {
    let mut pts: Vec<Value> = ring.iter().map(|c| json!([c[0], c[1]])).collect();
    if let Some(first) = ring.first() {
        pts.push(json!([first[0], first[1]]));
    }
    Value::Array(pts)
}

fn polygon_json(p: &Polygon) -> Value {
    Value::Array(p.rings().map(|r| ring_json(r)).collect())
}

/// Serializes deposits back to a FeatureCollection with closed rings.
pub fn deposits_to_geojson(deposits: &[SaltDeposit]) -> Value {
    let features: Vec<Value> = deposits
        .iter()
        .map(|d| {
            let geometry = if d.geometry.0.len() == 1 {
                json!({"type": "Polygon", "coordinates": polygon_json(&d.geometry.0[0])})
            } else {
                json!({
                    "type": "MultiPolygon",
                    "coordinates": d.geometry.0.iter().map(polygon_json).collect::<Vec<_>>()
                })
            };
            json!({
                "type": "Feature",
                "geometry": geometry,
                "properties": {
                    "id": d.id,
                    "name": d.name,
                    "salt_type": d.salt_type.as_str(),
                    "depth_top_m": d.depth_top_m.map(|i| json!([i.min, i.max])),
                    "thickness_m": d.thickness_m,
                    "insoluble_fraction": d.insoluble_fraction,
                    "area_km2": d.area_km2,
                    "suitability_hint": d.suitability_hint.as_str(),
                    "country_iso3": d.country_iso3,
                }
            })
        })
        .collect();
    json!({"type": "FeatureCollection", "features": features})
}
