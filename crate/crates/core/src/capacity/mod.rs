//! Working-gas energy of salt caverns from the real-gas law, plus aggregation and the
//! leached salt mass estimate.
//!
//! ```text
//! E = H_U · V · (1 − ϕ) · (p_max / Z(p_max, T) − p_min / Z(p_min, T)) / ((R / M) · T)
//! p_max = 0.8 · p_lith,  p_min = 0.3 · p_max,  p_lith = ρ_rock · g · d_top
//! ```

mod compressibility;

pub use compressibility::{compressibility, CompressibilityTable};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodata_io::RegionMap;
use crate::placement::CavernPlacement;

pub const JOULES_PER_GWH: f64 = 3.6e12;
pub const UNASSIGNED: &str = "unassigned";

/// Depth at which the cavern temperature is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureDepth {
    Top,
    #[default]
    MidHeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermoParams {
    /// Lower heating value of hydrogen, J/kg.
    pub lhv_j_per_kg: f64,
    pub molar_mass_kg_per_mol: f64,
    pub gas_constant_j_per_mol_k: f64,
    pub rock_density_kg_m3: f64,
    pub gravity_m_s2: f64,
    pub surface_temp_k: f64,
    pub geothermal_gradient_k_per_m: f64,
    pub temperature_depth: TemperatureDepth,
    pub p_max_factor: f64,
    pub p_min_factor: f64,
    pub salt_density_kg_m3: f64,
}

impl Default for ThermoParams {
    fn default() -> Self {
        ThermoParams {
            lhv_j_per_kg: 119.96e6,
            molar_mass_kg_per_mol: 0.0020159,
            gas_constant_j_per_mol_k: 8.314,
            rock_density_kg_m3: 2550.0,
            gravity_m_s2: 9.81,
            surface_temp_k: 288.15,
            geothermal_gradient_k_per_m: 0.030,
            temperature_depth: TemperatureDepth::MidHeight,
            p_max_factor: 0.8,
            p_min_factor: 0.3,
            salt_density_kg_m3: 2170.0,
        }
    }
}

impl ThermoParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lhv_j_per_kg", self.lhv_j_per_kg),
            ("molar_mass_kg_per_mol", self.molar_mass_kg_per_mol),
            ("gas_constant_j_per_mol_k", self.gas_constant_j_per_mol_k),
            ("rock_density_kg_m3", self.rock_density_kg_m3),
            ("gravity_m_s2", self.gravity_m_s2),
            ("surface_temp_k", self.surface_temp_k),
            ("geothermal_gradient_k_per_m", self.geothermal_gradient_k_per_m),
            ("p_max_factor", self.p_max_factor),
            ("p_min_factor", self.p_min_factor),
            ("salt_density_kg_m3", self.salt_density_kg_m3),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("thermo parameter {name} must be positive, got {v}")));
            }
        }
        if self.p_min_factor * self.p_max_factor >= 1.0 {
            return Err(Error::Validation("p_min_factor × p_max_factor must be < 1".into()));
        }
        Ok(())
    }

    /// Specific gas constant R/M in J/(kg·K).
    pub fn specific_gas_constant(&self) -> f64 {
        self.gas_constant_j_per_mol_k / self.molar_mass_kg_per_mol
    }
}

/// Overburden pressure in Pa at `depth_m`.
pub fn lithostatic_pressure(depth_m: f64, params: &ThermoParams) -> Result<f64> {
    if !(depth_m > 0.0 && depth_m.is_finite()) {
        return Err(Error::Validation(format!("depth must be positive, got {depth_m}")));
    }
    Ok(params.rock_density_kg_m3 * params.gravity_m_s2 * depth_m)
}

/// `(p_min, p_max)` in Pa.
pub fn operating_pressures(p_lith: f64, params: &ThermoParams) -> (f64, f64) {
    let p_max = params.p_max_factor * p_lith;
    (params.p_min_factor * p_max, p_max)
}

pub fn cavern_temperature(top_depth_m: f64, height_m: f64, params: &ThermoParams) -> f64 {
    let depth = match params.temperature_depth {
        TemperatureDepth::Top => top_depth_m,
        TemperatureDepth::MidHeight => top_depth_m + 0.5 * height_m,
    };
    params.surface_temp_k + params.geothermal_gradient_k_per_m * depth
}

/// Working-gas energy in joules for an explicit geometry.
pub fn working_gas_energy_j(
    volume_m3: f64,
    insoluble_fraction: f64,
    top_depth_m: f64,
    height_m: f64,
    params: &ThermoParams,
    table: &CompressibilityTable,
) -> Result<f64> {
    let p_lith = lithostatic_pressure(top_depth_m, params)?;
    let (p_min, p_max) = operating_pressures(p_lith, params);
    let t = cavern_temperature(top_depth_m, height_m, params);
    let bracket = p_max / table.z(p_max, t)? - p_min / table.z(p_min, t)?;
    Ok(params.lhv_j_per_kg * volume_m3 * (1.0 - insoluble_fraction) * bracket
        / (params.specific_gas_constant() * t))
}

/// Capacity of a placed cavern in GWh.
pub fn cavern_capacity(
    placement: &CavernPlacement,
    params: &ThermoParams,
    table: &CompressibilityTable,
) -> Result<f64> {
    let top = placement.cavern_top_depth_m.ok_or_else(|| {
        Error::Validation(format!(
            "placement {}#{} has no cavern depth assigned",
            placement.deposit_id, placement.index
        ))
    })?;
    let e = working_gas_energy_j(
        placement.spec.volume_m3,
        placement.insoluble_fraction,
        top,
        placement.spec.height_m,
        params,
        table,
    )?;
    Ok((e / JOULES_PER_GWH).max(0.0))
}

#[derive(Debug, Clone, Copy)]
pub enum Grouping<'a> {
    Country,
    Deposit,
    Region(&'a RegionMap),
}

/// Totals per group in TWh.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CapacityTable {
    pub groups: BTreeMap<String, f64>,
}

impl CapacityTable {
    /// Sum of the group totals in key order.
    pub fn total_twh(&self) -> f64 {
        self.groups.values().sum()
    }
}

/// Sums capacities per group. Placements are summed in (deposit id, index) order so the
/// result does not depend on input order.
pub fn aggregate_capacity(placements: &[CavernPlacement], grouping: Grouping<'_>) -> Result<CapacityTable> {
    let mut sorted: Vec<&CavernPlacement> = placements.iter().collect();
    sorted.sort_by(|a, b| (a.deposit_id.as_str(), a.index).cmp(&(b.deposit_id.as_str(), b.index)));
    let mut groups: BTreeMap<String, f64> = BTreeMap::new();
    let mut unassigned = 0usize;
    for p in sorted {
        let gwh = p.capacity_gwh.ok_or_else(|| {
            Error::Validation(format!("placement {}#{} has no capacity", p.deposit_id, p.index))
        })?;
        let key = match grouping {
            Grouping::Deposit => p.deposit_id.clone(),
            Grouping::Country if !p.country_iso3.is_empty() => p.country_iso3.clone(),
            Grouping::Region(map) => match map.region_of(&p.country_iso3) {
                Some(r) => r.to_string(),
                None => {
                    unassigned += 1;
                    UNASSIGNED.to_string()
                }
            },
            Grouping::Country => {
                unassigned += 1;
                UNASSIGNED.to_string()
            }
        };
        *groups.entry(key).or_insert(0.0) += gwh / 1000.0;
    }
    if unassigned > 0 {
        log::warn!("{unassigned} placements without a group assignment, bucketed as {UNASSIGNED:?}");
    }
    Ok(CapacityTable { groups })
}

/// Leached salt mass in Mt per year when all caverns are built over `build_horizon_years`.
pub fn salt_mass_rate(placements: &[CavernPlacement], build_horizon_years: f64, params: &ThermoParams) -> Result<f64> {
    if !(build_horizon_years > 0.0) {
        return Err(Error::Validation(format!(
            "build horizon must be positive, got {build_horizon_years}"
        )));
    }
    let kg: f64 = placements
        .iter()
        .map(|p| p.spec.volume_m3 * (1.0 - p.insoluble_fraction) * params.salt_density_kg_m3)
        .sum();
    Ok(kg / 1e9 / build_horizon_years)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodata_io::SaltType;
    use crate::placement::{CavernSpec, SeparationFactor};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    pub(crate) fn placement(country: &str, top: f64, phi: f64) -> CavernPlacement {
        CavernPlacement {
            deposit_id: "d".into(),
            index: 0,
            country_iso3: country.into(),
            row: 0,
            col: 0,
            x_m: 0.0,
            y_m: 0.0,
            lon: 0.0,
            lat: 0.0,
            cavern_top_depth_m: Some(top),
            spec: CavernSpec::for_salt(SaltType::Domal, SeparationFactor::DEFAULT),
            insoluble_fraction: phi,
            capacity_gwh: None,
        }
    }

    #[test]
    fn lithostatic_examples() {
        let p = ThermoParams::default();
        assert_relative_eq!(lithostatic_pressure(1000.0, &p).unwrap(), 25.0155e6, max_relative = 1e-15);
        assert_relative_eq!(lithostatic_pressure(500.0, &p).unwrap(), 12.50775e6, max_relative = 1e-15);
        assert_relative_eq!(lithostatic_pressure(2000.0, &p).unwrap(), 50.031e6, max_relative = 1e-15);
        assert!(lithostatic_pressure(0.0, &p).is_err());
        assert!(lithostatic_pressure(-5.0, &p).is_err());
    }

    #[test]
    fn operating_pressure_examples() {
        let p = ThermoParams::default();
        let (lo, hi) = operating_pressures(25.0155e6, &p);
        assert_relative_eq!(hi, 20.0124e6, max_relative = 1e-12);
        assert_relative_eq!(lo, 6.00372e6, max_relative = 1e-12);
        let (lo, hi) = operating_pressures(0.1e6, &p);
        assert_relative_eq!((lo, hi).0, 0.024e6, max_relative = 1e-12);
        assert_relative_eq!(hi, 0.08e6, max_relative = 1e-12);
        let (lo2, hi2) = operating_pressures(0.2e6, &p);
        assert_relative_eq!(lo2, 2.0 * lo, max_relative = 1e-12);
        assert_relative_eq!(hi2, 2.0 * hi, max_relative = 1e-12);
    }

    #[test]
    fn insolubles_scale_linearly() {
        let (p, t) = (ThermoParams::default(), CompressibilityTable::hydrogen());
        let full = cavern_capacity(&placement("A", 1000.0, 0.0), &p, &t).unwrap();
        let less = cavern_capacity(&placement("A", 1000.0, 0.25), &p, &t).unwrap();
        assert_relative_eq!(full / less, 4.0 / 3.0, max_relative = 1e-12);
        assert_eq!(cavern_capacity(&placement("A", 1000.0, 1.0), &p, &t).unwrap(), 0.0);
        assert!((100.0..1000.0).contains(&full), "{full}");
    }

    #[test]
    fn units_agree_between_pa_and_mpa() {
        let (p, t) = (ThermoParams::default(), CompressibilityTable::hydrogen());
        let e_pa = working_gas_energy_j(750_000.0, 0.0, 1200.0, 300.0, &p, &t).unwrap();
        // same bracket in MPa with R scaled to MJ/(mol·K)
        let p_max = 0.8 * lithostatic_pressure(1200.0, &p).unwrap();
        let p_min = 0.3 * p_max;
        let temp = cavern_temperature(1200.0, 300.0, &p);
        let bracket_mpa = p_max / 1e6 / t.z(p_max, temp).unwrap() - p_min / 1e6 / t.z(p_min, temp).unwrap();
        let r_mj = p.gas_constant_j_per_mol_k / 1e6;
        let e_mpa = p.lhv_j_per_kg * 750_000.0 * bracket_mpa / (r_mj / p.molar_mass_kg_per_mol * temp);
        assert_relative_eq!(e_pa, e_mpa, max_relative = 1e-9);
    }

    #[test]
    fn missing_depth_is_an_error() {
        let mut pl = placement("A", 1000.0, 0.0);
        pl.cavern_top_depth_m = None;
        assert!(cavern_capacity(&pl, &ThermoParams::default(), &CompressibilityTable::hydrogen()).is_err());
    }

    #[test]
    fn aggregation() {
        assert!(aggregate_capacity(&[], Grouping::Country).unwrap().groups.is_empty());
        let mut a = placement("AAA", 1000.0, 0.0);
        a.capacity_gwh = Some(1000.0);
        let mut b = placement("BBB", 1000.0, 0.0);
        b.capacity_gwh = Some(2000.0);
        b.index = 1;
        let mut c = placement("", 1000.0, 0.0);
        c.capacity_gwh = Some(500.0);
        c.index = 2;
        let t = aggregate_capacity(&[a.clone(), b.clone()], Grouping::Country).unwrap();
        assert_eq!(t.groups["AAA"], 1.0);
        assert_eq!(t.total_twh(), 3.0);
        let t = aggregate_capacity(&[c, a, b], Grouping::Country).unwrap();
        assert_eq!(t.groups[UNASSIGNED], 0.5);
    }

    #[test]
    fn salt_mass_examples() {
        let p = ThermoParams::default();
        assert_eq!(salt_mass_rate(&[placement("A", 1000.0, 0.0)], 1.0, &p).unwrap(), 1.6275);
        assert_eq!(salt_mass_rate(&[placement("A", 1000.0, 1.0)], 1.0, &p).unwrap(), 0.0);
        assert!(salt_mass_rate(&[], 0.0, &p).is_err());
    }

    proptest! {
        #[test]
        fn bracket_positive_over_depth_window(top in 500.0..1700.0f64, phi in 0.0..0.99f64) {
            let (p, t) = (ThermoParams::default(), CompressibilityTable::hydrogen());
            let e = cavern_capacity(&placement("A", top, phi), &p, &t).unwrap();
            prop_assert!(e > 0.0);
        }

        #[test]
        fn aggregation_permutation_invariant(caps in proptest::collection::vec(0.0..500.0f64, 1..30), rot in 0usize..30) {
            let ps: Vec<CavernPlacement> = caps.iter().enumerate().map(|(i, &c)| {
                let mut pl = placement(["AAA", "BBB", "CCC"][i % 3], 1000.0, 0.0);
                pl.index = i;
                pl.capacity_gwh = Some(c);
                pl
            }).collect();
            let mut rotated = ps.clone();
            rotated.rotate_left(rot % ps.len());
            prop_assert_eq!(aggregate_capacity(&ps, Grouping::Country).unwrap(), aggregate_capacity(&rotated, Grouping::Country).unwrap());
        }
    }
}
