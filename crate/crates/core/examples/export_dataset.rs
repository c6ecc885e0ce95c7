//! Timeline run streamed into the one-second binner, then sector and site
//! aggregation with fault labels, written as the dataset CSVs.
//!
//! ```text
//! cargo run --release --example export_dataset [out-dir]
//! ```

use std::path::PathBuf;

use ranforge::dataset::{build_dataset, RunInfo, UeBinner};
use ranforge::engine::{FaultEffect, FaultSpec};
use ranforge::{run_timeline, Environment, ScenarioSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("ranforge-dataset"));

    let mut spec = ScenarioSpec::hex_grid(Environment::UrbanEmbb, 1, 3);
    spec.simulation_time = 120.0;
    spec.faults.push(FaultSpec { target_cell: 3, start_s: 60.0, end_s: 62.0, effect: FaultEffect::PowerReduction { drop_db: 20.0 } });
    spec.validate()?;

    let mut binner = UeBinner::default();
    let seed = 5;
    let run = run_timeline(&spec, seed, &mut binner)?;
    let info = RunInfo {
        environment: spec.environment,
        seed,
        scenario_sha256: String::new(),
        simulation_time_s: spec.simulation_time,
        tick_s: spec.params.tick_s,
        ticks: run.ticks,
        bins: spec.bins(),
        sites: run.deployment.sites.len(),
        cell_sites: spec.cell_sites(),
        adjacency: run.deployment.site_adjacency(),
    };
    let data = build_dataset(&binner.finish(), &info, &run.labels)?;
    let files = data.write(&out_dir)?;

    println!("{} ticks, {} handovers", run.ticks, run.handovers.len());
    println!("{} site rows, anomalous share {:.4}", data.bs_rows.len(), data.anomalous_fraction());
    for f in &files {
        println!("wrote {}", f.display());
    }
    for row in data.bs_rows.iter().filter(|r| r.bs_id == 1 && (59..63).contains(&r.time_s)) {
        println!(
            "t={:>3} bs={} rsrp={:>8.2} sinr={:>6.2} anomalous={} {}",
            row.time_s,
            row.bs_id,
            row.rsrp_dbm.unwrap_or(f64::NAN),
            row.sinr_db.unwrap_or(f64::NAN),
            row.is_anomalous,
            row.fault_kind
        );
    }
    Ok(())
}
