use serde::Serialize;

use super::SaltDeposit;
use crate::error::{Error, Result};
use crate::geometry::{BBox, Coord, LocalProjection};

/// Deposits wider than this must be split before rasterization. Beyond it the
/// equirectangular scaling drifts too far from true distances.
pub const MAX_DEPOSIT_EXTENT_M: f64 = 2_000_000.0;

/// Snap tolerance in cell units, absorbs float noise from degree→meter conversion.
const SNAP_EPS: f64 = 1e-6;

/// A regular metric grid in a deposit-local projection.
///
/// Row 0 is the southernmost row; cell `(row, col)` spans
/// `[x0 + col·s, x0 + (col+1)·s) × [y0 + row·s, y0 + (row+1)·s)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalGrid {
    pub projection: LocalProjection,
    /// Lower-left corner in projected meters, a multiple of `cell_size_m`.
    pub x0: f64,
    pub y0: f64,
    pub cell_size_m: f64,
    pub width: usize,
    pub height: usize,
}

impl LocalGrid {
    /// Lower-left grid corner as lon/lat.
    pub fn origin(&self) -> Coord {
        self.projection.inverse([self.x0, self.y0])
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn cell_center(&self, row: usize, col: usize) -> Coord {
        [
            self.x0 + (col as f64 + 0.5) * self.cell_size_m,
            self.y0 + (row as f64 + 0.5) * self.cell_size_m,
        ]
    }

    pub fn cell_area_km2(&self) -> f64 {
        self.cell_size_m * self.cell_size_m / 1e6
    }

    /// Cell containing a projected point. Points within float noise of the
    /// outer edge are clamped to the border cell.
    pub fn cell_of(&self, xy: Coord) -> Option<(usize, usize)> {
        let fc = (xy[0] - self.x0) / self.cell_size_m;
        let fr = (xy[1] - self.y0) / self.cell_size_m;
        let clamp = |f: f64, n: usize| -> Option<usize> {
            if f < -SNAP_EPS || f > n as f64 + SNAP_EPS || n == 0 {
                None
            } else {
                Some((f.floor().max(0.0) as usize).min(n - 1))
            }
        };
        Some((clamp(fr, self.height)?, clamp(fc, self.width)?))
    }

    pub fn bbox(&self) -> BBox {
        BBox {
            min: [self.x0, self.y0],
            max: [
                self.x0 + self.width as f64 * self.cell_size_m,
                self.y0 + self.height as f64 * self.cell_size_m,
            ],
        }
    }
}

/// Builds the raster frame for one deposit: bounding box grown by `margin_m`,
/// snapped outward to multiples of `cell_size_m` in the centroid-anchored projection.
pub fn build_local_grid(deposit: &SaltDeposit, cell_size_m: f64, margin_m: f64) -> Result<LocalGrid> {
    if !(cell_size_m > 0.0 && cell_size_m.is_finite()) {
        return Err(Error::Validation(format!(
            "cell size must be positive, got {cell_size_m}"
        )));
    }
    if !(margin_m >= 0.0 && margin_m.is_finite()) {
        return Err(Error::Validation(format!(
            "grid margin must be non-negative, got {margin_m}"
        )));
    }
    let projection = LocalProjection::new(deposit.geometry.centroid());
    let bbox = BBox::from_points(deposit.geometry.vertices().map(|c| projection.forward(c)))
        .ok_or_else(|| Error::Validation(format!("deposit {} has no vertices", deposit.id)))?;
    let extent = (bbox.max[0] - bbox.min[0]).max(bbox.max[1] - bbox.min[1]);
    if extent > MAX_DEPOSIT_EXTENT_M {
        return Err(Error::SplitRequired {
            deposit: deposit.id.clone(),
            extent_km: extent / 1000.0,
            limit_km: MAX_DEPOSIT_EXTENT_M / 1000.0,
        });
    }
    let b = bbox.expand(margin_m);
    let lo = |v: f64| (v / cell_size_m + SNAP_EPS).floor();
    let hi = |v: f64| (v / cell_size_m - SNAP_EPS).ceil();
    let (c0, c1) = (lo(b.min[0]), hi(b.max[0]));
    let (r0, r1) = (lo(b.min[1]), hi(b.max[1]));
    Ok(LocalGrid {
        projection,
        x0: c0 * cell_size_m,
        y0: r0 * cell_size_m,
        cell_size_m,
        width: ((c1 - c0) as usize).max(1),
        height: ((r1 - r0) as usize).max(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodata_io::{DepthInterval, SaltType, SuitabilityHint};
    use crate::geometry::{MultiPolygon, Polygon, EARTH_RADIUS_M};

    pub(crate) fn deposit_km(lon: f64, lat: f64, w_km: f64, h_km: f64) -> SaltDeposit {
        let m_per_deg = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        let dlat = h_km * 1000.0 / m_per_deg;
        let dlon = w_km * 1000.0 / (m_per_deg * lat.to_radians().cos());
        let ring = vec![
            [lon - dlon / 2.0, lat - dlat / 2.0],
            [lon + dlon / 2.0, lat - dlat / 2.0],
            [lon + dlon / 2.0, lat + dlat / 2.0],
            [lon - dlon / 2.0, lat + dlat / 2.0],
        ];
        SaltDeposit {
            id: "d".into(),
            name: "d".into(),
            geometry: MultiPolygon(vec![Polygon::new(ring, vec![])]),
            salt_type: SaltType::Domal,
            depth_top_m: Some(DepthInterval::new(800.0, 1200.0)),
            thickness_m: Some(300.0),
            insoluble_fraction: Some(0.1),
            area_km2: w_km * h_km,
            suitability_hint: SuitabilityHint::Unknown,
            country_iso3: "XXX".into(),
        }
    }

    #[test]
    fn ten_km_deposit_with_twenty_km_margin() {
        let d = deposit_km(0.0, 0.0, 10.0, 10.0);
        let g = build_local_grid(&d, 100.0, 20_000.0).unwrap();
        assert_eq!((g.width, g.height), (500, 500));
        assert_eq!(g, build_local_grid(&d, 100.0, 20_000.0).unwrap());
    }

    #[test]
    fn zero_cell_size_rejected() {
        let d = deposit_km(0.0, 0.0, 10.0, 10.0);
        assert!(matches!(
            build_local_grid(&d, 0.0, 0.0),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn continental_deposit_needs_split() {
        let d = deposit_km(10.0, 45.0, 2500.0, 100.0);
        assert!(matches!(
            build_local_grid(&d, 100.0, 0.0),
            Err(Error::SplitRequired { .. })
        ));
    }

    #[test]
    fn vertices_fall_inside_grid_without_margin() {
        let d = deposit_km(13.4, 52.5, 7.3, 3.9);
        let g = build_local_grid(&d, 100.0, 0.0).unwrap();
        for v in d.geometry.vertices() {
            assert!(g.cell_of(g.projection.forward(v)).is_some());
        }
    }
}
