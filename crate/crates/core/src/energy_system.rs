//! Storage need, sufficiency ledgers, and regional sharing of cavern capacity.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::capacity::{CapacityTable, UNASSIGNED};
use crate::error::{Error, Result};
use crate::geodata_io::{DemandTable, RegionMap};

/// Potential over need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sufficiency {
    Ratio(f64),
    /// Positive potential, zero need.
    Unbounded,
    /// Zero potential and zero need.
    Undefined,
}

impl Sufficiency {
    pub fn is_sufficient(self) -> bool {
        match self {
            Sufficiency::Ratio(r) => r >= 1.0,
            Sufficiency::Unbounded => true,
            Sufficiency::Undefined => false,
        }
    }

    pub fn percent(self) -> Option<f64> {
        match self {
            Sufficiency::Ratio(r) => Some(100.0 * r),
            _ => None,
        }
    }

    /// Fixed-width text form used in CSV output.
    pub fn format_percent(self, decimals: usize) -> String {
        match self {
            Sufficiency::Ratio(r) => format!("{:.*}", decimals, 100.0 * r),
            Sufficiency::Unbounded => "unbounded".into(),
            Sufficiency::Undefined => "undefined".into(),
        }
    }
}

impl Serialize for Sufficiency {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sufficiency::Ratio(r) => s.serialize_f64(*r),
            Sufficiency::Unbounded => s.serialize_str("unbounded"),
            Sufficiency::Undefined => s.serialize_str("undefined"),
        }
    }
}

pub fn storage_need(annual_demand_twh: f64, fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Validation(format!("storage fraction must lie in (0, 1], got {fraction}")));
    }
    if !(annual_demand_twh >= 0.0) {
        return Err(Error::Validation(format!("demand must be non-negative, got {annual_demand_twh}")));
    }
    Ok(fraction * annual_demand_twh)
}

pub fn sufficiency(potential_twh: f64, need_twh: f64) -> Result<Sufficiency> {
    if !(potential_twh >= 0.0 && need_twh >= 0.0) {
        return Err(Error::Validation(format!(
            "potential ({potential_twh}) and need ({need_twh}) must be non-negative"
        )));
    }
    Ok(if need_twh > 0.0 {
        Sufficiency::Ratio(potential_twh / need_twh)
    } else if potential_twh > 0.0 {
        Sufficiency::Unbounded
    } else {
        Sufficiency::Undefined
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LedgerFlags {
    pub self_sufficient: bool,
    /// The entity's region covers the regional need. Only set on country ledgers.
    pub region_sufficient: bool,
    pub no_potential: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub potential_twh: f64,
    pub need_twh: f64,
    pub demand_twh: f64,
    pub sufficiency: Sufficiency,
    pub flags: LedgerFlags,
}

impl LedgerEntry {
    pub fn new(potential_twh: f64, need_twh: f64, demand_twh: f64) -> Result<Self> {
        let s = sufficiency(potential_twh, need_twh)?;
        Ok(LedgerEntry {
            potential_twh,
            need_twh,
            demand_twh,
            sufficiency: s,
            flags: LedgerFlags {
                self_sufficient: s.is_sufficient(),
                region_sufficient: false,
                no_potential: potential_twh == 0.0,
            },
        })
    }

    pub fn surplus_twh(&self) -> f64 {
        self.potential_twh - self.need_twh
    }
}

/// Entries keyed by country ISO3 or region name.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SufficiencyLedger {
    pub entries: BTreeMap<String, LedgerEntry>,
}

impl SufficiencyLedger {
    pub fn total_potential_twh(&self) -> f64 {
        self.entries.values().map(|e| e.potential_twh).sum()
    }

    pub fn total_need_twh(&self) -> f64 {
        self.entries.values().map(|e| e.need_twh).sum()
    }

    pub fn total_demand_twh(&self) -> f64 {
        self.entries.values().map(|e| e.demand_twh).sum()
    }
}

/// Country ledger over the demand table's universe. Potential of countries absent
/// from the demand table is dropped with a warning.
pub fn country_ledger(potentials: &CapacityTable, demand: &DemandTable, fraction: f64) -> Result<SufficiencyLedger> {
    let mut entries = BTreeMap::new();
    for (iso3, &twh) in &demand.rows {
        let potential = potentials.groups.get(iso3).copied().unwrap_or(0.0);
        entries.insert(iso3.clone(), LedgerEntry::new(potential, storage_need(twh, fraction)?, twh)?);
    }
    for (iso3, twh) in &potentials.groups {
        if !demand.rows.contains_key(iso3) {
            log::warn!("{twh:.3} TWh of potential in {iso3}, which has no demand row; left out of the ledger");
        }
    }
    Ok(SufficiencyLedger { entries })
}

fn region_key<'a>(regions: &'a RegionMap, iso3: &str) -> &'a str {
    regions.region_of(iso3).unwrap_or(UNASSIGNED)
}

/// Region ledger on summed potentials, needs and demands. Countries without a region
/// are pooled under `"unassigned"`.
pub fn regional_sufficiency(ledger: &SufficiencyLedger, regions: &RegionMap) -> Result<SufficiencyLedger> {
    let mut sums: BTreeMap<String, (f64, f64, f64)> = BTreeMap::new();
    let mut missing = Vec::new();
    for (iso3, e) in &ledger.entries {
        if regions.region_of(iso3).is_none() {
            missing.push(iso3.as_str());
        }
        let s = sums.entry(region_key(regions, iso3).to_string()).or_default();
        s.0 += e.potential_twh;
        s.1 += e.need_twh;
        s.2 += e.demand_twh;
    }
    if !missing.is_empty() {
        log::warn!("countries without region assignment grouped as {UNASSIGNED:?}: {}", missing.join(", "));
    }
    let mut entries = BTreeMap::new();
    for (region, (p, n, d)) in sums {
        entries.insert(region, LedgerEntry::new(p, n, d)?);
    }
    Ok(SufficiencyLedger { entries })
}

/// Copies each region's sufficiency onto its member countries.
pub fn mark_region_sufficiency(countries: &mut SufficiencyLedger, region_ledger: &SufficiencyLedger, regions: &RegionMap) {
    for (iso3, e) in countries.entries.iter_mut() {
        e.flags.region_sufficient = region_ledger
            .entries
            .get(region_key(regions, iso3))
            .is_some_and(|r| r.flags.self_sufficient);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharingFlow {
    pub donor: String,
    pub recipient: String,
    pub twh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharingPlan {
    pub region: String,
    pub total_potential_twh: f64,
    pub total_need_twh: f64,
    pub storage_abroad_twh: f64,
    pub donors: Vec<String>,
    pub recipients: Vec<String>,
    pub flows: Vec<SharingFlow>,
}

fn by_amount_desc(a: &(&str, f64), b: &(&str, f64)) -> std::cmp::Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

/// Within each region, covers country deficits from donor surpluses, largest deficit
/// first, drawing from the largest surplus first. Ties break on the ISO3 code.
pub fn storage_abroad(ledger: &SufficiencyLedger, regions: &RegionMap) -> Vec<SharingPlan> {
    let mut members: BTreeMap<&str, Vec<(&str, &LedgerEntry)>> = BTreeMap::new();
    for (iso3, e) in &ledger.entries {
        members.entry(region_key(regions, iso3)).or_default().push((iso3.as_str(), e));
    }
    members
        .into_iter()
        .map(|(region, countries)| {
            let mut donors: Vec<(&str, f64)> = countries
                .iter()
                .filter(|(_, e)| e.surplus_twh() > 0.0)
                .map(|(c, e)| (*c, e.surplus_twh()))
                .collect();
            let mut deficits: Vec<(&str, f64)> = countries
                .iter()
                .filter(|(_, e)| e.surplus_twh() < 0.0)
                .map(|(c, e)| (*c, -e.surplus_twh()))
                .collect();
            donors.sort_by(by_amount_desc);
            deficits.sort_by(by_amount_desc);

            let mut flows = Vec::new();
            let mut recipients = Vec::new();
            let mut d = 0;
            for &(recipient, deficit) in &deficits {
                let mut open = deficit;
                while open > 0.0 && d < donors.len() {
                    let take = open.min(donors[d].1);
                    if take > 0.0 {
                        flows.push(SharingFlow {
                            donor: donors[d].0.to_string(),
                            recipient: recipient.to_string(),
                            twh: take,
                        });
                        open -= take;
                        donors[d].1 -= take;
                    }
                    if donors[d].1 <= 0.0 {
                        d += 1;
                    }
                }
                if open < deficit {
                    recipients.push(recipient.to_string());
                }
                if d >= donors.len() {
                    break;
                }
            }
            let mut donor_names: Vec<String> = Vec::new();
            for f in &flows {
                if !donor_names.contains(&f.donor) {
                    donor_names.push(f.donor.clone());
                }
            }
            SharingPlan {
                region: region.to_string(),
                total_potential_twh: countries.iter().map(|(_, e)| e.potential_twh).sum(),
                total_need_twh: countries.iter().map(|(_, e)| e.need_twh).sum(),
                storage_abroad_twh: flows.iter().map(|f| f.twh).sum(),
                donors: donor_names,
                recipients,
                flows,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShareMode {
    /// Each country on its own potential.
    Country,
    /// A country also counts when its region as a whole is sufficient.
    Region,
}

fn counts_as_sufficient(e: &LedgerEntry, mode: ShareMode) -> bool {
    match mode {
        ShareMode::Country => e.flags.self_sufficient,
        ShareMode::Region => e.flags.self_sufficient || e.flags.region_sufficient,
    }
}

/// Percentage of total demand held by sufficient entities.
pub fn balanced_demand_share(ledger: &SufficiencyLedger, mode: ShareMode) -> Result<f64> {
    let total = ledger.total_demand_twh();
    if !(total > 0.0) {
        return Err(Error::Validation("global demand must be positive".into()));
    }
    let covered: f64 = ledger
        .entries
        .values()
        .filter(|e| counts_as_sufficient(e, mode))
        .map(|e| e.demand_twh)
        .sum();
    Ok(100.0 * covered / total)
}

/// `(sufficient, total)`; entities with neither potential nor need are left out of both.
pub fn sufficient_country_count(ledger: &SufficiencyLedger, mode: ShareMode) -> (usize, usize) {
    let counted = ledger
        .entries
        .values()
        .filter(|e| e.sufficiency != Sufficiency::Undefined);
    let (mut n, mut total) = (0, 0);
    for e in counted {
        total += 1;
        if counts_as_sufficient(e, mode) {
            n += 1;
        }
    }
    (n, total)
}

/// Shared storage as a percentage of baseline trade, one full cycle per year.
pub fn transport_increment(shared_twh: f64, baseline_trade_twh: f64) -> Result<f64> {
    if !(baseline_trade_twh > 0.0) {
        return Err(Error::Validation(format!(
            "baseline trade must be positive, got {baseline_trade_twh}"
        )));
    }
    Ok(100.0 * shared_twh / baseline_trade_twh)
}

pub fn expansion_rate(total_built_twh: f64, years: f64) -> Result<f64> {
    if !(years > 0.0) {
        return Err(Error::Validation(format!("years must be positive, got {years}")));
    }
    Ok(total_built_twh / years)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ledger(rows: &[(&str, f64, f64)]) -> SufficiencyLedger {
        SufficiencyLedger {
            entries: rows
                .iter()
                .map(|&(c, p, n)| (c.to_string(), LedgerEntry::new(p, n, n * 10.0).unwrap()))
                .collect(),
        }
    }

    fn one_region(countries: &[&str]) -> RegionMap {
        RegionMap::from_rows(countries.iter().map(|c| (c.to_string(), "R".to_string())), None).unwrap()
    }

    #[test]
    fn storage_need_examples() {
        assert_relative_eq!(storage_need(1000.0, 0.10).unwrap(), 100.0);
        assert_relative_eq!(storage_need(1000.0, 0.06).unwrap(), 60.0);
        assert_eq!(storage_need(0.0, 0.1).unwrap(), 0.0);
        assert!(storage_need(1000.0, 0.0).is_err());
        assert!(storage_need(1000.0, 1.5).is_err());
    }

    #[test]
    fn sufficiency_examples() {
        assert_eq!(sufficiency(50.0, 50.0).unwrap().percent(), Some(100.0));
        assert_eq!(sufficiency(0.0, 5.0).unwrap().percent(), Some(0.0));
        assert_eq!(sufficiency(5.0, 0.0).unwrap(), Sufficiency::Unbounded);
        assert_eq!(sufficiency(0.0, 0.0).unwrap(), Sufficiency::Undefined);
        assert!(sufficiency(-1.0, 1.0).is_err());
        let need = 119_677.0 / 1677.77;
        assert_relative_eq!(sufficiency(119_677.0, need).unwrap().percent().unwrap(), 167_777.0, max_relative = 1e-9);
    }

    #[test]
    fn regional_examples() {
        let l = ledger(&[("AAA", 10.0, 1.0), ("BBB", 0.0, 1.0)]);
        let r = regional_sufficiency(&l, &one_region(&["AAA", "BBB"])).unwrap();
        assert_relative_eq!(r.entries["R"].sufficiency.percent().unwrap(), 500.0);
        let single = ledger(&[("AAA", 3.0, 2.0)]);
        let r = regional_sufficiency(&single, &one_region(&["AAA"])).unwrap();
        assert_eq!(r.entries["R"].sufficiency, single.entries["AAA"].sufficiency);
        let r = regional_sufficiency(&l, &RegionMap::default()).unwrap();
        assert!(r.entries.contains_key(UNASSIGNED));
    }

    #[test]
    fn greedy_sharing_example() {
        // surplus 100, deficits 30 and 90
        let l = ledger(&[("DON", 110.0, 10.0), ("SMA", 0.0, 30.0), ("BIG", 0.0, 90.0)]);
        let plans = storage_abroad(&l, &one_region(&["DON", "SMA", "BIG"]));
        assert_eq!(plans.len(), 1);
        let p = &plans[0];
        assert_relative_eq!(p.storage_abroad_twh, 100.0);
        assert_eq!(p.flows[0].recipient, "BIG");
        assert_relative_eq!(p.flows[0].twh, 90.0);
        assert_relative_eq!(p.flows[1].twh, 10.0);
        assert_eq!(p.donors, vec!["DON".to_string()]);
        let selfish = ledger(&[("AAA", 5.0, 1.0), ("BBB", 7.0, 7.0)]);
        assert_eq!(storage_abroad(&selfish, &one_region(&["AAA", "BBB"]))[0].storage_abroad_twh, 0.0);
    }

    #[test]
    fn shares_and_counts() {
        let mut l = SufficiencyLedger::default();
        l.entries.insert("AAA".into(), LedgerEntry::new(10.0, 6.0, 60.0).unwrap());
        l.entries.insert("BBB".into(), LedgerEntry::new(0.0, 4.0, 40.0).unwrap());
        assert_relative_eq!(balanced_demand_share(&l, ShareMode::Country).unwrap(), 60.0);
        assert_eq!(sufficient_country_count(&l, ShareMode::Country), (1, 2));
        assert_eq!(sufficient_country_count(&SufficiencyLedger::default(), ShareMode::Country), (0, 0));
        assert!(balanced_demand_share(&SufficiencyLedger::default(), ShareMode::Country).is_err());
        let map = one_region(&["AAA", "BBB"]);
        let r = regional_sufficiency(&l, &map).unwrap();
        mark_region_sufficiency(&mut l, &r, &map);
        assert_relative_eq!(balanced_demand_share(&l, ShareMode::Region).unwrap(), 100.0);
        l.entries.insert("ZZZ".into(), LedgerEntry::new(0.0, 0.0, 0.0).unwrap());
        assert_eq!(sufficient_country_count(&l, ShareMode::Country), (1, 2));
    }

    #[test]
    fn side_computations() {
        assert_relative_eq!(transport_increment(207.0, 1325.0).unwrap(), 15.622641509433961, max_relative = 1e-12);
        assert_eq!(transport_increment(0.0, 1325.0).unwrap(), 0.0);
        assert!(transport_increment(1.0, 0.0).is_err());
        assert_relative_eq!(expansion_rate(4942.0, 25.0).unwrap(), 197.68);
        assert_relative_eq!(expansion_rate(4942.0, 12.5).unwrap(), 2.0 * 197.68);
        assert_eq!(expansion_rate(0.0, 25.0).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn scale_invariance_and_mediant(rows in proptest::collection::vec((0.0..100.0f64, 0.1..100.0f64), 1..8), c in 0.01..100.0f64) {
            let names: Vec<String> = (0..rows.len()).map(|i| format!("C{i:02}")).collect();
            let l = SufficiencyLedger { entries: names.iter().zip(&rows).map(|(n, &(p, d))| (n.clone(), LedgerEntry::new(p, d, d * 10.0).unwrap())).collect() };
            let scaled = SufficiencyLedger { entries: names.iter().zip(&rows).map(|(n, &(p, d))| (n.clone(), LedgerEntry::new(p * c, d * c, d * c * 10.0).unwrap())).collect() };
            let map = RegionMap::from_rows(names.iter().map(|n| (n.clone(), "R".to_string())), None).unwrap();
            prop_assert_eq!(sufficient_country_count(&l, ShareMode::Country), sufficient_country_count(&scaled, ShareMode::Country));
            let a = balanced_demand_share(&l, ShareMode::Country).unwrap();
            let b = balanced_demand_share(&scaled, ShareMode::Country).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
            let r = regional_sufficiency(&l, &map).unwrap().entries["R"].sufficiency.percent().unwrap();
            let ratios: Vec<f64> = l.entries.values().map(|e| e.sufficiency.percent().unwrap()).collect();
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12));
            let rs = regional_sufficiency(&scaled, &map).unwrap().entries["R"].sufficiency.percent().unwrap();
            prop_assert!((r - rs).abs() <= 1e-9 * r.max(1.0));
            for plan in storage_abroad(&l, &map) {
                let surplus: f64 = l.entries.values().map(|e| e.surplus_twh().max(0.0)).sum();
                let inflow: f64 = plan.flows.iter().map(|f| f.twh).sum();
                prop_assert!((inflow - plan.storage_abroad_twh).abs() < 1e-9);
                prop_assert!(plan.storage_abroad_twh <= surplus + 1e-9);
            }
        }
    }
}
