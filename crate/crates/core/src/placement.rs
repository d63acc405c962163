//! Cavern packing on a square lattice.
//!
//! Lattice nodes sit at `grid origin + k·pitch` along both axes, with
//! `pitch = separation_factor × diameter` measured between cavern centers. A node is
//! kept iff the cell containing it is eligible.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::eligibility::EligibilityRaster;
use crate::error::{Error, Result};
use crate::geodata_io::{DepthInterval, SaltDeposit, SaltType};

/// Center-to-center spacing in cavern diameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct SeparationFactor(u8);

impl SeparationFactor {
    pub const DEFAULT: SeparationFactor = SeparationFactor(4);

    pub fn get(self) -> u8 {
        self.0
    }
}

impl Default for SeparationFactor {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl TryFrom<u8> for SeparationFactor {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            3..=5 => Ok(SeparationFactor(v)),
            _ => Err(Error::Validation(format!(
                "separation factor must be 3, 4 or 5 diameters, got {v}"
            ))),
        }
    }
}

impl From<SeparationFactor> for u8 {
    fn from(f: SeparationFactor) -> u8 {
        f.0
    }
}

impl fmt::Display for SeparationFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavernSpec {
    pub shape: SaltType,
    pub height_m: f64,
    pub diameter_m: f64,
    pub volume_m3: f64,
    pub separation_factor: SeparationFactor,
}

impl CavernSpec {
    /// Reference cavern geometry per salt type.
    pub fn for_salt(shape: SaltType, separation_factor: SeparationFactor) -> Self {
        let (height_m, diameter_m, volume_m3) = match shape {
            SaltType::Domal => (300.0, 58.0, 750_000.0),
            SaltType::Bedded => (120.0, 84.0, 500_000.0),
        };
        CavernSpec {
            shape,
            height_m,
            diameter_m,
            volume_m3,
            separation_factor,
        }
    }

    pub fn separation_m(&self) -> f64 {
        f64::from(self.separation_factor.get()) * self.diameter_m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CavernPlacement {
    pub deposit_id: String,
    /// Position in the deposit's (row, col)-sorted placement list.
    pub index: usize,
    pub country_iso3: String,
    pub row: usize,
    pub col: usize,
    /// Projected position in the deposit grid frame.
    pub x_m: f64,
    pub y_m: f64,
    pub lon: f64,
    pub lat: f64,
    pub cavern_top_depth_m: Option<f64>,
    pub spec: CavernSpec,
    pub insoluble_fraction: f64,
    pub capacity_gwh: Option<f64>,
}

/// Lattice nodes landing on eligible cells, sorted by (row, col).
pub fn pack_caverns(raster: &EligibilityRaster, spec: &CavernSpec, deposit: &SaltDeposit) -> Vec<CavernPlacement> {
    let grid = &raster.grid;
    let pitch = spec.separation_m();
    let extent_x = grid.width as f64 * grid.cell_size_m;
    let extent_y = grid.height as f64 * grid.cell_size_m;
    let nodes = |extent: f64| -> usize {
        if extent <= 0.0 {
            0
        } else {
            // nodes at k·pitch strictly inside [0, extent)
            let n = (extent / pitch).floor() as usize + 1;
            if (n - 1) as f64 * pitch >= extent {
                n - 1
            } else {
                n
            }
        }
    };
    let mut out = Vec::new();
    for i in 0..nodes(extent_y) {
        let y = grid.y0 + i as f64 * pitch;
        for j in 0..nodes(extent_x) {
            let x = grid.x0 + j as f64 * pitch;
            let Some((row, col)) = grid.cell_of([x, y]) else {
                continue;
            };
            if !raster.mask.get(row, col) {
                continue;
            }
            let [lon, lat] = grid.projection.inverse([x, y]);
            out.push(CavernPlacement {
                deposit_id: deposit.id.clone(),
                index: out.len(),
                country_iso3: deposit.country_iso3.clone(),
                row,
                col,
                x_m: x,
                y_m: y,
                lon,
                lat,
                cavern_top_depth_m: None,
                spec: *spec,
                insoluble_fraction: deposit.insoluble_fraction.unwrap_or(0.0),
                capacity_gwh: None,
            });
        }
    }
    out
}

/// Deepest admissible cavern top: the cavern must fit inside the intersection of the
/// deposit depth interval and the suitability window. Deposits without depth data
/// use the window alone.
pub fn admissible_top_depth(
    deposit_id: &str,
    deposit_depth: Option<DepthInterval>,
    window: &DepthInterval,
    height_m: f64,
) -> Result<f64> {
    let usable = match deposit_depth {
        Some(d) => d.intersect(window).ok_or_else(|| Error::PlacementRejected {
            deposit: deposit_id.to_string(),
            reason: format!(
                "depth interval [{}, {}] m lies outside the window [{}, {}] m",
                d.min, d.max, window.min, window.max
            ),
        })?,
        None => *window,
    };
    let top = usable.max - height_m;
    if top < usable.min {
        return Err(Error::PlacementRejected {
            deposit: deposit_id.to_string(),
            reason: format!(
                "usable depth [{}, {}] m is thinner than the {height_m} m cavern",
                usable.min, usable.max
            ),
        });
    }
    Ok(top)
}

pub fn assign_depth(
    placement: &CavernPlacement,
    deposit: &SaltDeposit,
    window: &DepthInterval,
) -> Result<CavernPlacement> {
    let top = admissible_top_depth(&deposit.id, deposit.depth_top_m, window, placement.spec.height_m)?;
    Ok(CavernPlacement {
        cavern_top_depth_m: Some(top),
        ..placement.clone()
    })
}
