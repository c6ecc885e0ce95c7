//! Snapshot calibration of the urban layout. Drops are evaluated in
//! parallel; the empirical CDFs of coupling gain and wideband SINR are
//! summarized, and compared by KS distance against reference percentile
//! tables when a directory of them is given.
//!
//! ```text
//! cargo run --release --example calibrate [drops] [reference-dir]
//! ```

use std::path::Path;

use ranforge::calibration::{calibration_report, empirical_cdf, ks_statistic, ReferenceSet, Thresholds};
use ranforge::{run_snapshot, Environment, ScenarioSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let drops: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(20);
    let reference = args.next();

    let spec = ScenarioSpec::calibration(Environment::UrbanEmbb);
    let start = std::time::Instant::now();
    let out = run_snapshot(&spec, drops, 7)?;
    println!("{drops} drops in {:.2?}: {} of {} samples on the 7 inner sites", start.elapsed(), out.samples.len(), out.generated);

    let cg = empirical_cdf(&out.coupling_gains())?;
    let sinr = empirical_cdf(&out.sinrs())?;
    println!("{:>5} {:>10} {:>10}", "pct", "CG dB", "SINR dB");
    for p in [5, 10, 25, 50, 75, 90, 95] {
        let q = p as f64 / 100.0;
        println!("{p:>5} {:>10.2} {:>10.2}", cg.quantile(q), sinr.quantile(q));
    }

    // seed-to-seed spread is a floor for any reference comparison
    let other = run_snapshot(&spec, drops, 8)?;
    println!(
        "KS between seeds 7 and 8: CG {:.4}, SINR {:.4}",
        ks_statistic(&cg, &empirical_cdf(&other.coupling_gains())?),
        ks_statistic(&sinr, &empirical_cdf(&other.sinrs())?)
    );

    if let Some(dir) = reference {
        let refs = ReferenceSet::load_dir(Path::new(&dir))?;
        let report = calibration_report(
            &out.coupling_gains(),
            &out.sinrs(),
            &refs,
            Thresholds::for_environment(spec.environment),
        )?;
        println!("{}", report.to_json());
    }
    Ok(())
}
