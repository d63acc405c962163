//! Land eligibility on a deposit's local grid.
//!
//! Each exclusion layer is burned into a footprint, dilated by its buffer with an exact
//! distance transform, and OR-ed into the exclusion set. Eligible cells are the deposit
//! interior minus that set. Horizontal drilling then reclaims non-hard-excluded deposit
//! cells within reach of a vertically eligible cell.

pub mod edt;
mod mask;
pub mod rasterize;

pub use mask::Mask;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodata_io::{ExclusionCategory, ExclusionLayer, LocalGrid, SaltDeposit};
use crate::geometry::Shape;

/// An exclusion layer together with its geometry (WGS84).
#[derive(Debug, Clone)]
pub struct LoadedLayer {
    pub layer: ExclusionLayer,
    pub shapes: Vec<Shape>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drilling {
    #[default]
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrillingMode {
    pub drilling: Drilling,
    /// Lateral reach of directional wells; only used in horizontal mode.
    pub reach_m: f64,
}

impl DrillingMode {
    pub const DEFAULT_REACH_M: f64 = 5000.0;

    pub fn vertical() -> Self {
        DrillingMode {
            drilling: Drilling::Vertical,
            reach_m: Self::DEFAULT_REACH_M,
        }
    }

    pub fn horizontal(reach_m: f64) -> Self {
        DrillingMode {
            drilling: Drilling::Horizontal,
            reach_m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.drilling == Drilling::Horizontal && !(self.reach_m > 0.0 && self.reach_m.is_finite()) {
            return Err(Error::Validation(format!(
                "horizontal reach must be positive, got {}",
                self.reach_m
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EligibilityRaster {
    pub grid: LocalGrid,
    /// Cells whose center lies inside the deposit polygon.
    pub deposit: Mask,
    /// `true` = eligible for cavern placement.
    pub mask: Mask,
    /// Deposit cells removed by each layer, in application order. A cell excluded by
    /// several layers is attributed to the first.
    pub provenance: Vec<(ExclusionCategory, usize)>,
}

impl EligibilityRaster {
    pub fn excluded_in_deposit(&self) -> usize {
        self.deposit.count() - self.mask.count()
    }
}

/// Projects WGS84 shapes into the grid frame, dropping shapes whose bounding box
/// cannot touch the grid.
pub fn project_shapes(shapes: &[Shape], grid: &LocalGrid) -> Vec<Shape> {
    let bounds = grid.bbox();
    let proj = grid.projection;
    shapes
        .iter()
        .map(|s| s.map_coords(|c| proj.forward(c)))
        .filter(|s| s.bbox().is_some_and(|b| b.intersects(&bounds)))
        .collect()
}

/// Cells whose center lies within `buffer_m` of the footprint of `shapes`.
/// `shapes` are in the grid's projected frame.
pub fn rasterize_shapes(shapes: &[Shape], buffer_m: f64, grid: &LocalGrid) -> Mask {
    let seeds = rasterize::footprint(grid, shapes);
    edt::dilate(&seeds, buffer_m, grid.cell_size_m)
}

pub fn rasterize_exclusion(layer: &LoadedLayer, grid: &LocalGrid) -> Mask {
    rasterize_shapes(&project_shapes(&layer.shapes, grid), layer.layer.buffer_m, grid)
}

pub fn deposit_mask(deposit: &SaltDeposit, grid: &LocalGrid) -> Mask {
    let proj = grid.projection;
    rasterize::fill_multipolygon(grid, &deposit.geometry.map_coords(|c| proj.forward(c)))
}

pub fn combine(
    grid: &LocalGrid,
    deposit: &Mask,
    exclusions: &[(ExclusionCategory, Mask)],
) -> Result<EligibilityRaster> {
    if deposit.dims() != (grid.width, grid.height) {
        return Err(Error::DimensionMismatch {
            expected: (grid.width, grid.height),
            actual: deposit.dims(),
        });
    }
    let mut mask = deposit.clone();
    let mut provenance = Vec::with_capacity(exclusions.len());
    for (category, excl) in exclusions {
        deposit.check_dims(excl)?;
        let before = mask.count();
        mask.and_not_assign(excl)?;
        provenance.push((*category, before - mask.count()));
    }
    Ok(EligibilityRaster {
        grid: grid.clone(),
        deposit: deposit.clone(),
        mask,
        provenance,
    })
}

pub fn apply_drilling_mode(
    raster: &EligibilityRaster,
    mode: &DrillingMode,
    hard_exclusions: &[Mask],
) -> Result<EligibilityRaster> {
    mode.validate()?;
    if mode.drilling == Drilling::Vertical {
        return Ok(raster.clone());
    }
    let mut reachable = edt::dilate(&raster.mask, mode.reach_m, raster.grid.cell_size_m);
    reachable.and_assign(&raster.deposit)?;
    for hard in hard_exclusions {
        reachable.and_not_assign(hard)?;
    }
    reachable.or_assign(&raster.mask)?;
    Ok(EligibilityRaster {
        mask: reachable,
        ..raster.clone()
    })
}

pub fn eligible_area_km2(raster: &EligibilityRaster) -> f64 {
    raster.mask.count() as f64 * raster.grid.cell_area_km2()
}

/// Full eligibility pass for one deposit.
pub fn evaluate_deposit(
    deposit: &SaltDeposit,
    grid: &LocalGrid,
    layers: &[LoadedLayer],
    mode: &DrillingMode,
) -> Result<EligibilityRaster> {
    let inside = deposit_mask(deposit, grid);
    let masks: Vec<(ExclusionCategory, Mask, bool)> = layers
        .iter()
        .map(|l| {
            (
                l.layer.category,
                rasterize_exclusion(l, grid),
                l.layer.applies_in_horizontal_mode,
            )
        })
        .collect();
    let exclusions: Vec<(ExclusionCategory, Mask)> =
        masks.iter().map(|(c, m, _)| (*c, m.clone())).collect();
    let vertical = combine(grid, &inside, &exclusions)?;
    let hard: Vec<Mask> = masks
        .into_iter()
        .filter(|(_, _, hard)| *hard)
        .map(|(_, m, _)| m)
        .collect();
    apply_drilling_mode(&vertical, mode, &hard)
}
