//! Geological screening of salt deposits.
//!
//! Depth is judged on the whole interval of the salt top: fully inside the window is
//! suitable, fully outside is unsuitable, straddling is partial. The depth window is
//! inclusive; thickness, insolubles and area thresholds are strict.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodata_io::{DepthInterval, SaltDeposit, SuitabilityHint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuitabilityCriteria {
    pub depth_window_m: DepthInterval,
    pub min_thickness_m: f64,
    pub max_insoluble_fraction: f64,
    pub min_area_km2: f64,
}

impl Default for SuitabilityCriteria {
    fn default() -> Self {
        SuitabilityCriteria {
            depth_window_m: DepthInterval::new(500.0, 2000.0),
            min_thickness_m: 200.0,
            max_insoluble_fraction: 0.25,
            min_area_km2: 15.0,
        }
    }
}

impl SuitabilityCriteria {
    pub fn validate(&self) -> Result<()> {
        let w = self.depth_window_m;
        if !(w.min > 0.0 && w.min < w.max) {
            return Err(Error::Validation(format!(
                "depth window [{}, {}] must satisfy 0 < min < max",
                w.min, w.max
            )));
        }
        if !(self.min_thickness_m > 0.0 && self.min_area_km2 > 0.0) {
            return Err(Error::Validation("thickness and area thresholds must be positive".into()));
        }
        if !(self.max_insoluble_fraction > 0.0 && self.max_insoluble_fraction < 1.0) {
            return Err(Error::Validation("max_insoluble_fraction must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suitability {
    Guaranteed,
    Partial,
    Unsuitable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeologyCase {
    #[default]
    GuaranteedOnly,
    GuaranteedAndPartial,
}

impl GeologyCase {
    pub fn admits(self, s: Suitability) -> bool {
        match self {
            GeologyCase::GuaranteedOnly => s == Suitability::Guaranteed,
            GeologyCase::GuaranteedAndPartial => s != Suitability::Unsuitable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Verdict {
    Met,
    Uncertain,
    Violated,
}

fn strict_min(value: Option<f64>, threshold: f64) -> Verdict {
    match value {
        None => Verdict::Uncertain,
        Some(v) if v > threshold => Verdict::Met,
        Some(_) => Verdict::Violated,
    }
}

fn depth_verdict(depth: Option<DepthInterval>, window: &DepthInterval) -> Verdict {
    match depth {
        None => Verdict::Uncertain,
        Some(d) if window.contains_interval(&d) => Verdict::Met,
        Some(d) if d.intersect(window).is_some() => Verdict::Uncertain,
        Some(_) => Verdict::Violated,
    }
}

pub fn classify_deposit(d: &SaltDeposit, c: &SuitabilityCriteria) -> Suitability {
    let insolubles = match d.insoluble_fraction {
        None => Verdict::Uncertain,
        Some(phi) if phi < c.max_insoluble_fraction => Verdict::Met,
        Some(_) => Verdict::Violated,
    };
    let hint = match d.suitability_hint {
        SuitabilityHint::Unknown | SuitabilityHint::Guaranteed => Verdict::Met,
        SuitabilityHint::Partial => Verdict::Uncertain,
        SuitabilityHint::Unsuitable => Verdict::Violated,
    };
    let verdicts = [
        depth_verdict(d.depth_top_m, &c.depth_window_m),
        strict_min(d.thickness_m, c.min_thickness_m),
        insolubles,
        strict_min(Some(d.area_km2), c.min_area_km2),
        hint,
    ];
    if verdicts.contains(&Verdict::Violated) {
        Suitability::Unsuitable
    } else if verdicts.contains(&Verdict::Uncertain) {
        Suitability::Partial
    } else {
        Suitability::Guaranteed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedDeposit {
    pub deposit: SaltDeposit,
    pub suitability: Suitability,
}

pub fn classify_all(deposits: &[SaltDeposit], c: &SuitabilityCriteria) -> Vec<ClassifiedDeposit> {
    deposits
        .iter()
        .map(|d| ClassifiedDeposit {
            deposit: d.clone(),
            suitability: classify_deposit(d, c),
        })
        .collect()
}

/// Deposits admitted by `case`. Partial deposits with a known depth interval are
/// clipped to the part inside the depth window; otherwise they pass unchanged.
pub fn select_case(
    deposits: &[ClassifiedDeposit],
    case: GeologyCase,
    c: &SuitabilityCriteria,
) -> Vec<SaltDeposit> {
    deposits
        .iter()
        .filter(|cd| case.admits(cd.suitability))
        .map(|cd| {
            let mut d = cd.deposit.clone();
            if cd.suitability == Suitability::Partial {
                if let Some(depth) = d.depth_top_m {
                    d.depth_top_m = depth.intersect(&c.depth_window_m).or(Some(depth));
                }
            }
            d
        })
        .collect()
}
