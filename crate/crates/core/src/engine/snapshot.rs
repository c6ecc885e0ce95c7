//! Snapshot Monte Carlo: independent static UE drops, strongest-cell
//! attachment, one sample per UE per drop.

use rayon::prelude::*;

use super::{EngineError, Measurement, RadioModel};
use crate::kpi::KpiSample;
use crate::scenario::ScenarioSpec;
use crate::topology::Deployment;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotOutput {
    /// Samples of UEs served by a collecting site, ordered by (drop, UE).
    pub samples: Vec<KpiSample>,
    /// Samples produced before the collecting-site filter.
    pub generated: usize,
}

impl SnapshotOutput {
    pub fn coupling_gains(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.coupling_gain).collect()
    }

    pub fn sinrs(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.sinr).collect()
    }
}

/// Runs `drops` independent drops. Drops are evaluated on the current
/// rayon pool; the output does not depend on its size.
pub fn run_snapshot(spec: &ScenarioSpec, drops: usize, seed: u64) -> Result<SnapshotOutput, EngineError> {
    if drops == 0 {
        return Err(EngineError::Config("at least one drop is required".into()));
    }
    if !spec.faults.is_empty() {
        return Err(EngineError::Config("snapshot mode is static; remove the faults from the scenario".into()));
    }
    let radio = RadioModel::from_params(&spec.params);
    let per_drop: Vec<Result<(Vec<KpiSample>, usize), EngineError>> =
        (0..drops).into_par_iter().map(|d| run_drop(spec, &radio, seed, d as u32)).collect();
    let mut samples = Vec::new();
    let mut generated = 0;
    for r in per_drop {
        let (s, g) = r?;
        samples.extend(s);
        generated += g;
    }
    Ok(SnapshotOutput { samples, generated })
}

fn run_drop(spec: &ScenarioSpec, radio: &RadioModel, seed: u64, drop: u32) -> Result<(Vec<KpiSample>, usize), EngineError> {
    let dep = Deployment::generate(spec, seed, drop as u64);
    let collecting = dep.inner_sites(spec.params.collecting_sites);
    let tx: Vec<f64> = dep.cells.iter().map(|c| c.tx_power).collect();
    let mut meas = Measurement::default();
    let mut out = Vec::with_capacity(dep.ues.len());
    for ue in &dep.ues {
        let draws = RadioModel::link_draws(&dep, seed, drop as u64, ue.id);
        radio.measure(&dep, &tx, ue, ue.position, &draws, &mut meas)?;
        let serving = meas.best_cell();
        let site = dep.site_of(serving);
        if collecting.binary_search(&site).is_err() {
            continue;
        }
        let k = radio.kpis(&dep, &meas, serving, tx[serving as usize], ue.position, None);
        out.push(KpiSample {
            time: 0.0,
            drop,
            ue_id: ue.id,
            serving_cell: serving,
            serving_site: site,
            position: ue.position,
            serving_distance: k.serving_distance,
            rsrp: k.rsrp,
            rsrq: k.rsrq,
            sinr: k.sinr,
            coupling_gain: k.coupling_gain,
        });
    }
    Ok((out, dep.ues.len()))
}
