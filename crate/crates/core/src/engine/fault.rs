//! Fault descriptions and ground-truth labeling.

use serde::{Deserialize, Serialize};

/// Default magnitudes used when a scenario omits them.
pub const DEFAULT_POWER_DROP_DB: f64 = 20.0;
pub const DEFAULT_LATE_HYSTERESIS_DB: f64 = 9.0;
pub const DEFAULT_LATE_TTT_S: f64 = 1.0;
pub const DEFAULT_INTERFERENCE_DBM: f64 = -90.0;

/// Largest admissible share of anomalous (site, second) bins.
pub const MAX_ANOMALOUS_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    TooLateHandover,
    ExcessivePowerReduction,
    InterCellInterference,
}

impl FaultKind {
    pub fn name(&self) -> &'static str {
        match self {
            FaultKind::TooLateHandover => "too_late_handover",
            FaultKind::ExcessivePowerReduction => "excessive_power_reduction",
            FaultKind::InterCellInterference => "inter_cell_interference",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::TooLateHandover, Self::ExcessivePowerReduction, Self::InterCellInterference]
            .into_iter()
            .find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FaultEffect {
    /// Target cell transmits `drop_db` below nominal.
    PowerReduction { drop_db: f64 },
    /// Target cell's A3 parameters replaced by (larger) faulty values.
    LateHandover { hysteresis_db: f64, ttt_s: f64 },
    /// Extra co-channel interferer of `power_dbm` seen by the target
    /// cell's UEs.
    Interference { power_dbm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub target_cell: u32,
    pub start_s: f64,
    pub end_s: f64,
    pub effect: FaultEffect,
}

impl FaultSpec {
    pub fn kind(&self) -> FaultKind {
        match self.effect {
            FaultEffect::PowerReduction { .. } => FaultKind::ExcessivePowerReduction,
            FaultEffect::LateHandover { .. } => FaultKind::TooLateHandover,
            FaultEffect::Interference { .. } => FaultKind::InterCellInterference,
        }
    }

    pub fn is_active(&self, t: f64) -> bool {
        t >= self.start_s && t < self.end_s
    }

    /// One-second bins touched by the window.
    pub fn bins(&self) -> std::ops::Range<u64> {
        (self.start_s.floor() as u64)..(self.end_s.ceil() as u64)
    }
}

/// Per-(site, bin) ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultLabel {
    pub bs_id: u32,
    pub time_bin: u64,
    pub kind: FaultKind,
    pub is_anomalous: bool,
}

/// Anomalous labels for every (site, bin) covered by a fault window.
/// When windows of different kinds overlap on a site, the earliest
/// declared fault names the bin.
pub fn labels(faults: &[FaultSpec], cell_site: impl Fn(u32) -> u32, bins: u64) -> Vec<FaultLabel> {
    let mut seen = std::collections::BTreeMap::new();
    for f in faults {
        let site = cell_site(f.target_cell);
        for b in f.bins().filter(|b| *b < bins) {
            seen.entry((b, site)).or_insert(f.kind());
        }
    }
    seen.into_iter()
        .map(|((time_bin, bs_id), kind)| FaultLabel { bs_id, time_bin, kind, is_anomalous: true })
        .collect()
}

/// Share of anomalous (site, bin) pairs.
pub fn anomalous_fraction(faults: &[FaultSpec], cell_site: impl Fn(u32) -> u32, sites: usize, bins: u64) -> f64 {
    if sites == 0 || bins == 0 {
        return 0.0;
    }
    labels(faults, cell_site, bins).len() as f64 / (sites as f64 * bins as f64)
}
