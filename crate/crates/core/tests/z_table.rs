mod common;

use common::oracles::{lemmon_z, ZGrid};
use saltcav_core::capacity::{compressibility, working_gas_energy_j};
use saltcav_core::{CompressibilityTable, ThermoParams};

#[test]
fn shipped_nodes_match_the_correlation() {
    let table = CompressibilityTable::hydrogen();
    for &p in table.pressures_mpa() {
        for &t in table.temperatures_k() {
            let z = table.z(p * 1e6, t).unwrap();
            assert!((z - lemmon_z(p, t)).abs() <= 5e-7, "p={p} T={t}: {z} vs {}", lemmon_z(p, t));
        }
    }
}

#[test]
fn interpolation_between_nodes_stays_close_to_the_correlation() {
    let table = CompressibilityTable::hydrogen();
    let mut worst = 0.0f64;
    for i in 0..200 {
        let p = 0.3 + i as f64 * 0.29;
        let t = 272.5 + (i % 39) as f64 * 2.5;
        let z = compressibility(p * 1e6, t, &table).unwrap();
        worst = worst.max((z - lemmon_z(p, t)).abs() / lemmon_z(p, t));
    }
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn reference_point() {
    let z = CompressibilityTable::hydrogen().z(20e6, 310.0).unwrap();
    assert!((z - 1.12).abs() <= 0.02);
}

#[test]
fn custom_table_changes_capacity() {
    let ideal = "p_MPa,270,370\n0,1,1\n60,1,1\n";
    let ideal = CompressibilityTable::parse_csv(ideal).unwrap();
    let real = CompressibilityTable::hydrogen();
    let params = ThermoParams::default();
    let e_ideal = working_gas_energy_j(750_000.0, 0.0, 1000.0, 300.0, &params, &ideal).unwrap();
    let e_real = working_gas_energy_j(750_000.0, 0.0, 1000.0, 300.0, &params, &real).unwrap();
    assert!(e_ideal > e_real);
}

#[test]
fn hand_bilinear_agrees_with_table() {
    let grid = ZGrid::from_csv(include_str!("../assets/hydrogen_z.csv"));
    let table = CompressibilityTable::hydrogen();
    for (p, t) in [(12.34e6, 301.7), (0.05e6, 270.0), (59.9e6, 369.9), (20e6, 310.0)] {
        assert!((grid.at(p, t) - table.z(p, t).unwrap()).abs() < 1e-12);
    }
}
