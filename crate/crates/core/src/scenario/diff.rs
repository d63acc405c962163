//! Comparison of two finished runs over the same input datasets.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use super::artifacts::{read_country_rows, read_metadata, read_summary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryDelta {
    pub iso3: String,
    pub capacity_a_twh: f64,
    pub capacity_b_twh: f64,
    /// `None` when run A has no capacity but run B does.
    pub capacity_change_pct: Option<f64>,
    pub sufficiency_a_pct: Option<f64>,
    pub sufficiency_b_pct: Option<f64>,
    pub sufficiency_change_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffReport {
    pub capacity_a_twh: f64,
    pub capacity_b_twh: f64,
    pub capacity_change_pct: Option<f64>,
    /// Percentage-point changes of the balanced demand shares.
    pub share_country_change_pp: f64,
    pub share_region_change_pp: f64,
    pub sufficient_countries_change: i64,
    pub countries: Vec<CountryDelta>,
}

/// Relative change from `a` to `b` in percent.
fn pct_change(a: f64, b: f64) -> Option<f64> {
    if a == b {
        Some(0.0)
    } else if a == 0.0 {
        None
    } else {
        Some(100.0 * (b - a) / a)
    }
}

fn opt_change(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    pct_change(a?, b?)
}

pub fn diff_scenarios(a: &Path, b: &Path) -> Result<DiffReport> {
    let (ma, mb) = (read_metadata(a)?, read_metadata(b)?);
    if ma.dataset_hashes != mb.dataset_hashes {
        let keys: BTreeSet<&String> = ma.dataset_hashes.keys().chain(mb.dataset_hashes.keys()).collect();
        let differing: Vec<&str> = keys
            .into_iter()
            .filter(|k| ma.dataset_hashes.get(*k) != mb.dataset_hashes.get(*k))
            .map(String::as_str)
            .collect();
        return Err(Error::DatasetMismatch(format!(
            "{} and {} were computed from different inputs ({}); deltas would mix data changes with scenario changes",
            a.display(),
            b.display(),
            differing.join(", ")
        )));
    }
    let (sa, sb) = (read_summary(a)?, read_summary(b)?);
    let rows_b: std::collections::BTreeMap<String, _> =
        read_country_rows(b)?.into_iter().map(|r| (r.iso3.clone(), r)).collect();
    let mut countries = Vec::new();
    for ra in read_country_rows(a)? {
        let Some(rb) = rows_b.get(&ra.iso3) else {
            return Err(Error::DatasetMismatch(format!("country {} missing from {}", ra.iso3, b.display())));
        };
        countries.push(CountryDelta {
            capacity_change_pct: pct_change(ra.potential_twh, rb.potential_twh),
            sufficiency_change_pct: opt_change(ra.sufficiency_pct, rb.sufficiency_pct),
            capacity_a_twh: ra.potential_twh,
            capacity_b_twh: rb.potential_twh,
            sufficiency_a_pct: ra.sufficiency_pct,
            sufficiency_b_pct: rb.sufficiency_pct,
            iso3: ra.iso3,
        });
    }
    Ok(DiffReport {
        capacity_a_twh: sa.total_capacity_twh,
        capacity_b_twh: sb.total_capacity_twh,
        capacity_change_pct: pct_change(sa.total_capacity_twh, sb.total_capacity_twh),
        share_country_change_pp: sb.balanced_share_country_pct - sa.balanced_share_country_pct,
        share_region_change_pp: sb.balanced_share_region_pct - sa.balanced_share_region_pct,
        sufficient_countries_change: sb.sufficient_countries as i64 - sa.sufficient_countries as i64,
        countries,
    })
}
