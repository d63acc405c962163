//! Tabulated hydrogen compressibility factor with bilinear interpolation.
//!
//! CSV layout: header `p_MPa,<T1>,<T2>,...` (kelvin), then one row per pressure in MPa.
//! The shipped table covers 0–60 MPa and 270–370 K.

use std::path::Path;

use crate::error::{Error, Result};

const HYDROGEN_Z_CSV: &str = include_str!("../../assets/hydrogen_z.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct CompressibilityTable {
    pressures_mpa: Vec<f64>,
    temperatures_k: Vec<f64>,
    /// Row-major over pressure, then temperature.
    z: Vec<f64>,
}

impl CompressibilityTable {
    /// The shipped hydrogen table.
    pub fn hydrogen() -> Self {
        Self::parse_csv(HYDROGEN_Z_CSV).expect("shipped hydrogen Z table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text)
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Validation(format!("compressibility table: {msg}"));
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| bad(e.to_string()))?
            .clone();
        let temperatures_k = headers
            .iter()
            .skip(1)
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad(format!("bad temperature header {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut pressures_mpa = Vec::new();
        let mut z = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let mut fields = record.iter().map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad number {f:?}")))
            });
            pressures_mpa.push(fields.next().ok_or_else(|| bad("empty row".into()))??);
            let row = fields.collect::<Result<Vec<_>>>()?;
            if row.len() != temperatures_k.len() {
                return Err(bad(format!("row has {} values, expected {}", row.len(), temperatures_k.len())));
            }
            z.extend(row);
        }
        let table = CompressibilityTable {
            pressures_mpa,
            temperatures_k,
            z,
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Validation(format!("compressibility table: {msg}")));
        let ascending = |v: &[f64]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]);
        if !ascending(&self.pressures_mpa) || !ascending(&self.temperatures_k) {
            return bad("axes need at least two strictly increasing values");
        }
        if self.pressures_mpa[0] < 0.0 || self.temperatures_k[0] <= 0.0 {
            return bad("pressures must be >= 0 and temperatures > 0");
        }
        if self.z.iter().any(|&z| !(z > 0.0 && z.is_finite())) {
            return bad("Z must be positive everywhere");
        }
        Ok(())
    }

    pub fn pressure_range_pa(&self) -> (f64, f64) {
        (self.pressures_mpa[0] * 1e6, self.pressures_mpa[self.pressures_mpa.len() - 1] * 1e6)
    }

    pub fn temperature_range_k(&self) -> (f64, f64) {
        (self.temperatures_k[0], self.temperatures_k[self.temperatures_k.len() - 1])
    }

    pub fn pressures_mpa(&self) -> &[f64] {
        &self.pressures_mpa
    }

    pub fn temperatures_k(&self) -> &[f64] {
        &self.temperatures_k
    }

    pub fn node(&self, pi: usize, ti: usize) -> f64 {
        self.z[pi * self.temperatures_k.len() + ti]
    }

    /// Z at pressure `p_pa` (pascal) and temperature `t_k`. No extrapolation.
    pub fn z(&self, p_pa: f64, t_k: f64) -> Result<f64> {
        let p = p_pa / 1e6;
        let (i, wp) = bracket(&self.pressures_mpa, p).ok_or_else(|| {
            let (min, max) = self.pressure_range_pa();
            Error::OutOfRange {
                quantity: "pressure [Pa]",
                value: p_pa,
                min,
                max,
            }
        })?;
        let (j, wt) = bracket(&self.temperatures_k, t_k).ok_or_else(|| {
            let (min, max) = self.temperature_range_k();
            Error::OutOfRange {
                quantity: "temperature [K]",
                value: t_k,
                min,
                max,
            }
        })?;
        let z00 = self.node(i, j);
        let z01 = self.node(i, j + 1);
        let z10 = self.node(i + 1, j);
        let z11 = self.node(i + 1, j + 1);
        Ok(z00 * (1.0 - wp) * (1.0 - wt) + z01 * (1.0 - wp) * wt + z10 * wp * (1.0 - wt) + z11 * wp * wt)
    }
}

/// Lower node index and fractional weight of `x` on an ascending axis.
fn bracket(axis: &[f64], x: f64) -> Option<(usize, f64)> {
    let last = axis.len() - 1;
    if !(x >= axis[0] && x <= axis[last]) {
        return None;
    }
    let i = axis.partition_point(|&a| a <= x).saturating_sub(1).min(last - 1);
    Some((i, (x - axis[i]) / (axis[i + 1] - axis[i])))
}

pub fn compressibility(p_pa: f64, t_k: f64, table: &CompressibilityTable) -> Result<f64> {
    table.z(p_pa, t_k)
}
