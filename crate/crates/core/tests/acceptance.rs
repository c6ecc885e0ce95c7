//! Acceptance checks. Prints one `PASS`, `FAIL` or `WITHHELD` line per
//! criterion and exits nonzero if any criterion fails.
//!
//! Calibration against 3GPP reference percentile curves needs reference
//! tables, which are not shipped. Point `RANFORGE_REFERENCE_DIR` at a
//! directory holding `urban_embb/` and `rural_embb/` subdirectories of
//! `coupling_gain_*.csv` / `sinr_*.csv` tables to run the full comparison.
//! Without them the calibration lines report `WITHHELD` together with the
//! result of the reference-free fallback checks.

use std::collections::{BTreeMap, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ranforge::calibration::{empirical_cdf, ks_statistic, Thresholds};
use ranforge::channel::{penetration_loss, LinkGeometry, PathLossModel, PenetrationClass};
use ranforge::engine::{fault, FaultEffect, FaultSpec, Mobility};
use ranforge::geometry::Point;
use ranforge::manifest::RunManifest;
use ranforge::params::{Materials, Propagation};
use ranforge::scenario::SiteDecl;
use ranforge::topology::{ue_height, Ue};
use ranforge::{parse_scenario, Deployment, Environment, ScenarioSpec, SimState};

const BIN: &str = env!("CARGO_BIN_EXE_ranforge");
const CALIBRATION_DROPS: usize = 50;
const CALIBRATION_BUDGET: Duration = Duration::from_secs(300);

enum Status {
    Pass,
    Fail,
    Withheld,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: String) -> Self {
        Self { status: if ok { Status::Pass } else { Status::Fail }, detail }
    }
}

type Check = Result<Outcome, String>;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn ranforge(args: &[&str]) -> Result<String, String> {
    let out = Command::new(BIN).args(args).output().map_err(|e| format!("spawn {BIN}: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "ranforge {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("temporary paths are UTF-8")
}

/// One column of a CSV file with a header row.
fn csv_column(path: &Path, column: &str) -> Result<Vec<f64>, String> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let idx = reader
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| format!("{} has no column {column}", path.display()))?;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        values.push(record[idx].parse::<f64>().map_err(|e| format!("{column}: {e}"))?);
    }
    Ok(values)
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * p).round() as usize;
    sorted[idx]
}

// ---------------------------------------------------------------- calibration

fn calibration(environment: Environment, yaml: &str) -> Check {
    let scenario = scenarios_dir().join(yaml);
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let drops = CALIBRATION_DROPS.to_string();
    let reference = std::env::var_os("RANFORGE_REFERENCE_DIR")
        .map(|d| PathBuf::from(d).join(environment.name()))
        .filter(|d| d.is_dir());
    let thresholds = Thresholds::for_environment(environment);

    let run = |seed: &str, out: &Path, reference: Option<&Path>| -> Result<Duration, String> {
        let mut args = vec!["calibrate", path_str(&scenario), "--drops", &drops, "--seed", seed, "-o", path_str(out)];
        if let Some(r) = reference {
            args.extend(["--reference", path_str(r)]);
        }
        let start = Instant::now();
        ranforge(&args)?;
        Ok(start.elapsed())
    };

    let out_a = tmp.path().join("a");
    let elapsed = run("1", &out_a, reference.as_deref())?;
    let samples_a = out_a.join("samples.csv");

    if let Some(dir) = &reference {
        let report: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(out_a.join("calibration_report.json")).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let entries = report["entries"].as_array().cloned().unwrap_or_default();
        let worst: Vec<String> = entries
            .iter()
            .map(|e| format!("{}/{} KS {:.4} <= {:.2}", e["kpi"], e["reference_name"], e["statistic"], e["threshold"]))
            .collect();
        let pass = report["pass"] == serde_json::Value::Bool(true) && !entries.is_empty() && elapsed <= CALIBRATION_BUDGET;
        return Ok(Outcome::check(
            pass,
            format!("{} references in {}; {}; {:.1?} for {drops} drops", entries.len(), dir.display(), worst.join(", "), elapsed),
        ));
    }

    // Reference-free fallback: runtime, seed-to-seed stability within the
    // reference thresholds, and for the urban layout the coupling-gain
    // support.
    let out_b = tmp.path().join("b");
    run("2", &out_b, None)?;
    let samples_b = out_b.join("samples.csv");
    let mut cg_a = csv_column(&samples_a, "coupling_gain_db")?;
    let cg_b = csv_column(&samples_b, "coupling_gain_db")?;
    let sinr_a = csv_column(&samples_a, "sinr_db")?;
    let sinr_b = csv_column(&samples_b, "sinr_db")?;
    let ks = |a: &[f64], b: &[f64]| -> Result<f64, String> {
        Ok(ks_statistic(&empirical_cdf(a).map_err(|e| e.to_string())?, &empirical_cdf(b).map_err(|e| e.to_string())?))
    };
    let ks_cg = ks(&cg_a, &cg_b)?;
    let ks_sinr = ks(&sinr_a, &sinr_b)?;
    cg_a.sort_by(f64::total_cmp);
    let (p1, p99) = (percentile(&cg_a, 0.01), percentile(&cg_a, 0.99));
    let support_ok = match environment {
        Environment::UrbanEmbb => p1 >= -125.0 && p1 <= -110.0 && p99 >= -70.0 && p99 <= -55.0,
        Environment::RuralEmbb => true,
    };
    let ok = elapsed <= CALIBRATION_BUDGET
        && ks_cg <= thresholds.coupling_gain
        && ks_sinr <= thresholds.wideband_sinr
        && support_ok;
    let detail = format!(
        "no reference curves (set RANFORGE_REFERENCE_DIR); fallback {}: {drops} drops in {:.1?}, \
         seed-to-seed KS CG {ks_cg:.4} <= {:.2}, SINR {ks_sinr:.4} <= {:.2}, CG p1 {p1:.1} dB p99 {p99:.1} dB",
        if ok { "passes" } else { "FAILS" },
        elapsed,
        thresholds.coupling_gain,
        thresholds.wideband_sinr,
    );
    Ok(Outcome { status: if ok { Status::Withheld } else { Status::Fail }, detail })
}

// ---------------------------------------------------------------- formulas

/// Second, independent evaluation of the UMa/RMa basic path loss: natural
/// logarithms, carrier in Hz, breakpoints recomputed from scratch.
struct OraclePathLoss {
    rural: bool,
    h_bs: f64,
    h_ut: f64,
    building: f64,
    street: f64,
    f_hz: f64,
}

impl OraclePathLoss {
    fn lg(x: f64) -> f64 {
        x.ln() / std::f64::consts::LN_10
    }

    fn evaluate(&self, d2d: f64, los: bool) -> f64 {
        let d3d = (d2d * d2d + (self.h_bs - self.h_ut).powi(2)).sqrt();
        let f_ghz = self.f_hz / 1e9;
        // the model tables fix c at 3e8 m/s
        let wavelength = 3.0e8 / self.f_hz;
        if !self.rural {
            let bp = 4.0 * (self.h_bs - 1.0) * (self.h_ut - 1.0) / wavelength;
            let los_pl = if d2d <= bp {
                28.0 + 22.0 * Self::lg(d3d) + 20.0 * Self::lg(f_ghz)
            } else {
                28.0 + 40.0 * Self::lg(d3d) + 20.0 * Self::lg(f_ghz)
                    - 9.0 * Self::lg(bp.powi(2) + (self.h_bs - self.h_ut).powi(2))
            };
            if los {
                return los_pl;
            }
            let nlos = 13.54 + 39.08 * Self::lg(d3d) + 20.0 * Self::lg(f_ghz) - 0.6 * (self.h_ut - 1.5);
            return nlos.max(los_pl);
        }
        let h = self.building;
        let pl1 = |d: f64| {
            20.0 * Self::lg(40.0 * std::f64::consts::PI * d * f_ghz / 3.0)
                + f64::min(0.03 * h.powf(1.72), 10.0) * Self::lg(d)
                - f64::min(0.044 * h.powf(1.72), 14.77)
                + 0.002 * Self::lg(h) * d
        };
        let bp = 2.0 * std::f64::consts::PI * self.h_bs * self.h_ut / wavelength;
        let los_pl = if d2d <= bp { pl1(d3d) } else { pl1(bp) + 40.0 * Self::lg(d3d / bp) };
        if los {
            return los_pl;
        }
        let w = self.street;
        let nlos = 161.04 - 7.1 * Self::lg(w) + 7.5 * Self::lg(h)
            - (24.37 - 3.7 * (h / self.h_bs).powi(2)) * Self::lg(self.h_bs)
            + (43.42 - 3.1 * Self::lg(self.h_bs)) * (Self::lg(d3d) - 3.0)
            + 20.0 * Self::lg(f_ghz)
            - (3.2 * Self::lg(11.75 * self.h_ut).powi(2) - 4.97);
        nlos.max(los_pl)
    }
}

fn formula_suite() -> Check {
    let mut failures = Vec::new();

    let materials = Materials::default();
    let low = penetration_loss(PenetrationClass::Low, 4.0, &materials);
    let high = penetration_loss(PenetrationClass::High, 4.0, &materials);
    if (low - 12.88).abs() > 0.01 || (high - 27.97).abs() > 0.01 {
        failures.push(format!("penetration {low:.4}/{high:.4} dB"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut heights = BTreeMap::new();
    for _ in 0..100_000 {
        let h = ue_height(&mut rng);
        *heights.entry((h * 1000.0).round() as i64).or_insert(0u32) += 1;
    }
    let expected: Vec<i64> = (0..8).map(|n| 1_500 + 3_000 * n).collect();
    let support: Vec<i64> = heights.keys().copied().collect();
    if support != expected {
        failures.push(format!("height support {support:?} (mm)"));
    }

    let ks_case = |a: &[f64], b: &[f64]| ks_statistic(&empirical_cdf(a).unwrap(), &empirical_cdf(b).unwrap());
    let ks_cases = [
        ks_case(&[1.0, 2.0, 3.0, 4.0], &[2.0, 3.0, 4.0, 5.0]),
        ks_case(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]),
        ks_case(&[1.0, 2.0], &[3.0, 4.0]),
    ];
    if ks_cases != [0.25, 0.0, 1.0] {
        failures.push(format!("KS oracle cases {ks_cases:?}"));
    }

    let mut worst: f64 = 0.0;
    for _ in 0..1_000 {
        let rural = rng.random_bool(0.5);
        let los = rng.random_bool(0.5);
        let oracle = if rural {
            OraclePathLoss {
                rural,
                h_bs: rng.random_range(10.0..150.0),
                h_ut: rng.random_range(1.0..10.0),
                building: rng.random_range(5.0..50.0),
                street: rng.random_range(5.0..50.0),
                f_hz: rng.random_range(0.5e9..7e9),
            }
        } else {
            OraclePathLoss {
                rural,
                h_bs: rng.random_range(10.0..50.0),
                h_ut: rng.random_range(1.5..22.5),
                building: 0.0,
                street: 0.0,
                f_hz: rng.random_range(0.5e9..30e9),
            }
        };
        let max_d = if rural && los { 10_000.0 } else { 5_000.0 };
        let d2d = rng.random_range(10.0..max_d);
        let model = PathLossModel {
            model: if rural { Propagation::RMa } else { Propagation::UMa },
            building_height: oracle.building,
            street_width: oracle.street,
            strict: true,
        };
        let geom = LinkGeometry::new(d2d, oracle.h_bs, oracle.h_ut, 0.0, 0.0, 0.0);
        let ours = model.path_loss(los, &geom, oracle.f_hz / 1e9).map_err(|e| e.to_string())?;
        worst = worst.max((ours - oracle.evaluate(d2d, los)).abs());
    }
    if worst > 1e-6 {
        failures.push(format!("path-loss oracle max deviation {worst:e} dB"));
    }

    Ok(Outcome::check(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "penetration {low:.2}/{high:.2} dB, heights {{1.5..22.5}} m, KS oracle {ks_cases:?}, \
                 path-loss max deviation {worst:.1e} dB over 1000 geometries"
            )
        } else {
            failures.join("; ")
        },
    ))
}

// ---------------------------------------------------------------- compression

fn compression() -> Check {
    let yaml = scenarios_dir().join("urban_embb.yaml");
    let yaml_lines = fs::read_to_string(&yaml).map_err(|e| e.to_string())?.lines().count();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        ranforge(&["compile", path_str(&yaml), "-o", path_str(out)])?;
    }
    let config_a = fs::read(a.join("config.ini")).map_err(|e| e.to_string())?;
    let config_b = fs::read(b.join("config.ini")).map_err(|e| e.to_string())?;
    let emitted = String::from_utf8_lossy(&config_a).lines().count();
    let identical = config_a == config_b
        && fs::read(a.join("deployment.csv")).map_err(|e| e.to_string())?
            == fs::read(b.join("deployment.csv")).map_err(|e| e.to_string())?;
    Ok(Outcome::check(
        yaml_lines <= 150 && emitted >= 1000 && identical,
        format!(
            "{yaml_lines} YAML lines (<= 150) -> {emitted} config lines (>= 1000), two compiles {}",
            if identical { "byte-identical" } else { "DIFFER" }
        ),
    ))
}

// ---------------------------------------------------------------- faults

fn seven_site_pair(seed: u64) -> Result<(SimState, SimState), String> {
    let spec = ScenarioSpec::hex_grid(Environment::UrbanEmbb, 1, 10);
    let deployment = Deployment::generate(&spec, seed, 0);
    let a = SimState::new(&spec, deployment.clone(), seed).map_err(|e| e.to_string())?;
    let b = SimState::new(&spec, deployment, seed).map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn power_fault() -> Result<String, String> {
    let drop_db = fault::DEFAULT_POWER_DROP_DB;
    let (mut base, mut faulty) = seven_site_pair(3)?;
    faulty.apply_fault(FaultSpec {
        target_cell: 4,
        start_s: 0.0,
        end_s: 10.0,
        effect: FaultEffect::PowerReduction { drop_db },
    });
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        base.step(0.1).map_err(|e| e.to_string())?;
        faulty.step(0.1).map_err(|e| e.to_string())?;
        for u in 0..base.ues().len() {
            let shift = base.cell_rsrp(u, 4) - faulty.cell_rsrp(u, 4);
            worst = worst.max((shift - drop_db).abs());
        }
    }
    if worst > 1e-9 {
        return Err(format!("power fault RSRP shift off by {worst:e} dB"));
    }
    Ok(format!("power: RSRP shift {drop_db} dB (max error {worst:.0e})"))
}

fn interference_fault() -> Result<String, String> {
    let (base, mut faulty) = seven_site_pair(3)?;
    faulty.apply_fault(FaultSpec {
        target_cell: 0,
        start_s: 0.0,
        end_s: 10.0,
        effect: FaultEffect::Interference { power_dbm: fault::DEFAULT_INTERFERENCE_DBM },
    });
    let served: Vec<usize> = (0..base.ues().len()).filter(|u| base.ues()[*u].serving == 0).collect();
    if served.is_empty() {
        return Err("no UE served by the interfered cell".into());
    }
    let mean = |s: &SimState| served.iter().map(|u| s.serving_kpis(*u).sinr).sum::<f64>() / served.len() as f64;
    let (before, after) = (mean(&base), mean(&faulty));
    if !(after < before) {
        return Err(format!("interference: mean SINR {before:.4} -> {after:.4} dB is not lower"));
    }
    Ok(format!("interference: mean SINR of {} UEs {before:.3} -> {after:.3} dB", served.len()))
}

/// First handover time and per-tick serving SINR of one UE crossing from
/// one site to a facing one. Keeps stepping until the handover and at
/// least `min_samples` samples are in.
fn crossing(late: bool, min_samples: usize) -> Result<(f64, Vec<f64>), String> {
    let mut spec = ScenarioSpec::hex_grid(Environment::UrbanEmbb, 0, 0);
    spec.sites = vec![
        SiteDecl { position: Point::new(0.0, 0.0), sector_azimuths: vec![0.0] },
        SiteDecl { position: Point::new(400.0, 0.0), sector_azimuths: vec![180.0] },
    ];
    spec.params.shadow.los_db = 0.0;
    spec.params.shadow.los_far_db = 0.0;
    spec.params.shadow.nlos_db = 0.0;
    spec.max_ue_distance = 450.0;
    let mut deployment = Deployment::skeleton(&spec);
    deployment.ues.push(Ue {
        id: 0,
        position: Point::new(150.0, 0.0),
        height: 1.5,
        indoor: false,
        penetration_class: PenetrationClass::Low,
        speed_kmh: 30.0,
        home_site: 0,
    });
    let mut state = SimState::new(&spec, deployment, 1).map_err(|e| e.to_string())?;
    state.set_mobility(0, Mobility::Path(VecDeque::from([Point::new(350.0, 0.0)])));
    if late {
        state.apply_fault(FaultSpec {
            target_cell: 0,
            start_s: 0.0,
            end_s: 60.0,
            effect: FaultEffect::LateHandover {
                hysteresis_db: fault::DEFAULT_LATE_HYSTERESIS_DB,
                ttt_s: fault::DEFAULT_LATE_TTT_S,
            },
        });
    }
    let mut sinr = vec![state.serving_kpis(0).sinr];
    while (state.handovers().is_empty() || sinr.len() < min_samples) && state.clock < 60.0 {
        state.step(0.1).map_err(|e| e.to_string())?;
        sinr.push(state.serving_kpis(0).sinr);
    }
    let first = state.handovers().first().ok_or("UE never handed over")?;
    Ok((first.time, sinr))
}

fn late_handover_fault() -> Result<String, String> {
    let (t_late, sinr_late) = crossing(true, 0)?;
    // the faulty run's samples before its handover, and the same ticks of
    // the baseline
    let window = sinr_late.len() - 1;
    let (t_base, sinr_base) = crossing(false, window)?;
    if !(t_late > t_base) {
        return Err(format!("too-late HO: first handover {t_late:.1} s not after {t_base:.1} s"));
    }
    let mean = |v: &[f64]| v[..window].iter().sum::<f64>() / window as f64;
    let (mean_base, mean_late) = (mean(&sinr_base), mean(&sinr_late));
    if !(mean_late < mean_base) {
        return Err(format!("too-late HO: pre-handover mean SINR {mean_late:.3} dB not below {mean_base:.3} dB"));
    }
    Ok(format!(
        "too-late HO: first handover {t_base:.1} s -> {t_late:.1} s, mean SINR before {t_late:.1} s {mean_base:.2} -> {mean_late:.2} dB"
    ))
}

/// Seven sites, one short window per fault kind.
const SMALL_FAULT_SCENARIO: &str = "\
environment: urban_embb
simulation_time_s: 30
seed: 5
sites:
  - {x: 0, y: 0, sectors: 3}
  - {x: 200, y: 0, sectors: 3}
  - {x: 100, y: 173.205, sectors: 3}
  - {x: -100, y: 173.205, sectors: 3}
  - {x: -200, y: 0, sectors: 3}
  - {x: -100, y: -173.205, sectors: 3}
  - {x: 100, y: -173.205, sectors: 3}
x2: all-to-all
users: {per_sector: 5, max_distance_m: 50}
faults:
  - {type: excessive_power_reduction, cell: 1, start_s: 5, end_s: 6}
  - {type: too_late_handover, cell: 7, start_s: 12, end_s: 13}
  - {type: inter_cell_interference, cell: 13, start_s: 20, end_s: 21}
";

/// compile, run and export of `yaml` into `root/<tag>/{compile,run,dataset}`.
fn pipeline(yaml: &Path, root: &Path, tag: &str, jobs: &str) -> Result<PathBuf, String> {
    let dir = root.join(tag);
    let (compile, run, dataset) = (dir.join("compile"), dir.join("run"), dir.join("dataset"));
    ranforge(&["--jobs", jobs, "compile", path_str(yaml), "-o", path_str(&compile)])?;
    ranforge(&["--jobs", jobs, "run", path_str(yaml), "-o", path_str(&run)])?;
    ranforge(&["--jobs", jobs, "export", path_str(&run), "-o", path_str(&dataset)])?;
    Ok(dir)
}

fn anomaly_budget(tmp: &Path) -> Result<String, String> {
    let yaml = tmp.join("faults.yaml");
    fs::write(&yaml, SMALL_FAULT_SCENARIO).map_err(|e| e.to_string())?;
    let dir = pipeline(&yaml, tmp, "budget", "2")?;
    let flags = csv_column(&dir.join("dataset/bs_kpis.csv"), "is_anomalous")?;
    let exported = flags.iter().filter(|f| **f == 1.0).count() as f64 / flags.len() as f64;

    let text = fs::read_to_string(scenarios_dir().join("urban_faults.yaml")).map_err(|e| e.to_string())?;
    let spec = parse_scenario(&text).map_err(|e| e.to_string())?;
    let cell_sites = spec.cell_sites();
    let declared = fault::anomalous_fraction(&spec.faults, |c| cell_sites[c as usize], spec.sites.len(), spec.bins());

    if exported > fault::MAX_ANOMALOUS_FRACTION || declared > fault::MAX_ANOMALOUS_FRACTION || exported == 0.0 {
        return Err(format!("anomalous share {exported:.4} exported, {declared:.4} in urban_faults.yaml"));
    }
    Ok(format!("anomalous share {exported:.4} on export, {declared:.4} for urban_faults.yaml (<= 0.02)"))
}

fn fault_observability() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let checks = [power_fault(), interference_fault(), late_handover_fault(), anomaly_budget(tmp.path())];
    let ok = checks.iter().all(|c| c.is_ok());
    let detail = checks.into_iter().map(|c| c.unwrap_or_else(|e| format!("FAILED {e}"))).collect::<Vec<_>>().join("; ");
    Ok(Outcome::check(ok, detail))
}

// ---------------------------------------------------------------- determinism

/// Every file of a pipeline directory except the manifests, which carry
/// wall-clock timestamps and are compared separately.
fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for stage in ["compile", "run", "dataset"] {
        for entry in fs::read_dir(dir.join(stage)).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            if name == ranforge::manifest::MANIFEST_FILE {
                let m = RunManifest::load(path.parent().unwrap()).map_err(|e| e.to_string())?;
                files.insert(format!("{stage}/{name}"), serde_json::to_vec(&m.without_timestamps()).unwrap());
            } else {
                files.insert(format!("{stage}/{name}"), fs::read(&path).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(files)
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let yaml = tmp.path().join("faults.yaml");
    fs::write(&yaml, SMALL_FAULT_SCENARIO).map_err(|e| e.to_string())?;
    let first = snapshot(&pipeline(&yaml, tmp.path(), "first", "8")?)?;
    let second = snapshot(&pipeline(&yaml, tmp.path(), "second", "8")?)?;
    let serial = snapshot(&pipeline(&yaml, tmp.path(), "serial", "1")?)?;
    let differing = |other: &BTreeMap<String, Vec<u8>>| -> Vec<String> {
        let mut names: Vec<String> = first.keys().chain(other.keys()).cloned().collect();
        names.dedup();
        names.sort();
        names.dedup();
        names.into_iter().filter(|n| first.get(n) != other.get(n)).collect()
    };
    let (d_repeat, d_jobs) = (differing(&second), differing(&serial));
    let dataset_files = first.keys().filter(|k| k.starts_with("dataset/")).count();
    Ok(Outcome::check(
        d_repeat.is_empty() && d_jobs.is_empty() && dataset_files >= 3,
        format!(
            "{} files ({dataset_files} dataset) compared; repeat run differs in {:?}, --jobs 1 vs 8 differs in {:?}",
            first.len(),
            d_repeat,
            d_jobs
        ),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 6] = [
        ("calibration shape, urban", || calibration(Environment::UrbanEmbb, "urban_embb.yaml")),
        ("calibration shape, rural", || calibration(Environment::RuralEmbb, "rural_embb.yaml")),
        ("formula suite", formula_suite),
        ("automation compression", compression),
        ("fault observability", fault_observability),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome { status: Status::Fail, detail: e });
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Withheld => "WITHHELD",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
        };
        println!("{tag:<8} {name}: {} [{:.1?}]", outcome.detail, start.elapsed());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
