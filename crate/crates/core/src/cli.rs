//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid scenario or arguments,
//! 3 runtime failure (I/O, numerical domain errors).

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::calibration::{self, CalibrationError, CalibrationKpi, ReferenceSet, Thresholds};
use crate::channel::{los_probability, LinkGeometry, PathLossModel};
use crate::dataset::{self, DatasetError, RunInfo, SampleWriter};
use crate::engine::{self, EngineError};
use crate::manifest::{sha256_hex, unix_now, RunManifest};
use crate::params::{Environment, RadioParams};
use crate::scenario::{emit_config, expand_x2, parse_scenario, CompileError, ScenarioSpec};
use crate::topology::Deployment;

pub const CONFIG_FILE: &str = "config.ini";
pub const DEPLOYMENT_FILE: &str = "deployment.csv";
pub const SCENARIO_COPY: &str = "scenario.yaml";
pub const SAMPLES_FILE: &str = "samples.csv";
pub const REPORT_FILE: &str = "calibration_report.json";
pub const OVERLAY_FILE: &str = "cdf_overlay.csv";

#[derive(Debug, Parser)]
#[command(name = "ranforge", version, about = "5G RAN system-level simulator and dataset generator")]
pub struct Cli {
    /// Worker threads for drops and per-UE evaluation (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a scenario and emit its long-form configuration.
    Compile {
        scenario: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Seed for UE and background placement (overrides the scenario).
        #[arg(long)]
        seed: Option<u64>,
        /// Also print the deployment CSV to stdout.
        #[arg(long)]
        dump_deployment: bool,
    },
    /// Snapshot Monte Carlo drops and KS comparison with reference curves.
    Calibrate {
        scenario: PathBuf,
        #[arg(long, default_value_t = 50)]
        drops: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
        /// Directory of `coupling_gain_*.csv` / `sinr_*.csv` percentile tables.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Time-stepped simulation with mobility, handover and faults.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Aggregate a run directory into the labeled per-site dataset.
    Export {
        run_dir: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Path loss and LOS probability against distance, as CSV.
    ChannelTable {
        #[arg(long, value_enum, default_value = "urban-embb")]
        environment: EnvArg,
        #[arg(long, default_value_t = 10.0)]
        from: f64,
        #[arg(long, default_value_t = 5000.0)]
        to: f64,
        #[arg(long, default_value_t = 10.0)]
        step: f64,
        #[arg(long, default_value_t = 1.5)]
        ue_height: f64,
        /// Output file (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum EnvArg {
    UrbanEmbb,
    RuralEmbb,
}

impl From<EnvArg> for Environment {
    fn from(e: EnvArg) -> Self {
        match e {
            EnvArg::UrbanEmbb => Environment::UrbanEmbb,
            EnvArg::RuralEmbb => Environment::RuralEmbb,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::Io(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Config(_) => CliError::Validation(e.to_string()),
            EngineError::Channel(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::AnomalyBudget { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<CalibrationError> for CliError {
    fn from(e: CalibrationError) -> Self {
        match e {
            CalibrationError::BadReference { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::Runtime(format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Compile { scenario, out, seed, dump_deployment } => compile(&scenario, &out, seed, dump_deployment),
        Command::Calibrate { scenario, drops, seed, out, reference } => {
            calibrate(&scenario, drops, seed, &out, reference.as_deref())
        }
        Command::Run { scenario, seed, out } => run(&scenario, seed, &out),
        Command::Export { run_dir, out } => export(&run_dir, &out),
        Command::ChannelTable { environment, from, to, step, ue_height, out } => {
            channel_table(environment.into(), from, to, step, ue_height, out.as_deref())
        }
    }
}

struct Loaded {
    spec: ScenarioSpec,
    text: String,
    sha256: String,
    seed: u64,
}

fn load(path: &Path, seed_flag: Option<u64>) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let spec = parse_scenario(&text)?;
    let seed = seed_flag.or(spec.seed).ok_or_else(|| {
        CliError::Validation(format!("{}: no seed; set `seed` in the scenario or pass --seed", path.display()))
    })?;
    Ok(Loaded { sha256: sha256_hex(text.as_bytes()), spec, text, seed })
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(io_err(path))
}

fn finalize(manifest: RunManifest, dir: &Path) -> Result<(), CliError> {
    manifest.finalize(dir).map(|_| ()).map_err(io_err(dir))
}

/// Compiles a scenario: config, deployment dump and a copy of the input.
pub fn compile(scenario: &Path, out: &Path, seed: Option<u64>, dump_deployment: bool) -> Result<(), CliError> {
    let started = unix_now();
    let l = load(scenario, seed)?;
    prepare_out(out)?;
    let deployment = Deployment::generate(&l.spec, l.seed, 0);
    let config = emit_config(&l.spec, &expand_x2(&l.spec), &deployment, l.seed);
    write(&out.join(CONFIG_FILE), &config)?;
    let csv = deployment.to_csv();
    write(&out.join(DEPLOYMENT_FILE), &csv)?;
    write(&out.join(SCENARIO_COPY), &l.text)?;
    if dump_deployment {
        print!("{csv}");
    }
    eprintln!(
        "compiled {} ({} lines) into {} ({} lines)",
        scenario.display(),
        l.text.lines().count(),
        out.join(CONFIG_FILE).display(),
        config.lines().count()
    );
    finalize(RunManifest::new("compile", Some(l.sha256), Some(l.seed), started), out)
}

/// Snapshot calibration. Without references the samples and the run's
/// own percentile tables are still written; the report records that no
/// comparison was made.
pub fn calibrate(
    scenario: &Path,
    drops: usize,
    seed: Option<u64>,
    out: &Path,
    reference: Option<&Path>,
) -> Result<(), CliError> {
    let started = unix_now();
    let l = load(scenario, seed)?;
    if drops == 0 {
        return Err(CliError::Usage("--drops must be at least 1".into()));
    }
    let refs = match reference {
        Some(dir) => Some(ReferenceSet::load_dir(dir).map_err(|e| match e {
            CalibrationError::Io(io) => CliError::Validation(format!("{}: {io}", dir.display())),
            other => other.into(),
        })?),
        None => None,
    };
    let output = engine::run_snapshot(&l.spec, drops, l.seed)?;
    prepare_out(out)?;
    write_samples(&out.join(SAMPLES_FILE), &output.samples)?;
    let (cg, sinr) = (output.coupling_gains(), output.sinrs());
    if cg.is_empty() {
        return Err(CliError::Validation("no UE attached to a collecting site; nothing to calibrate".into()));
    }
    for (kpi, values) in [(CalibrationKpi::CouplingGain, &cg), (CalibrationKpi::WidebandSinr, &sinr)] {
        let curve = calibration::empirical_cdf(values)?;
        write(&out.join(format!("{}run.csv", kpi.file_prefix())), &calibration::percentile_table(&curve))?;
    }
    let thresholds = Thresholds::for_environment(l.spec.environment);
    let summary = match &refs {
        Some(set) => {
            let report = calibration::calibration_report(&cg, &sinr, set, thresholds)?;
            write(&out.join(REPORT_FILE), &(report.to_json() + "\n"))?;
            write(&out.join(OVERLAY_FILE), &calibration::overlay_csv(&cg, &sinr, set)?)?;
            for e in &report.entries {
                eprintln!(
                    "KS {:<14} vs {:<16} {:.4} (limit {:.2}) {}",
                    e.result.kpi.name(),
                    e.result.reference_name,
                    e.result.statistic,
                    e.threshold,
                    if e.pass { "pass" } else { "FAIL" }
                );
            }
            report.pass
        }
        None => {
            let empty = ReferenceSet::default();
            write(&out.join(OVERLAY_FILE), &calibration::overlay_csv(&cg, &sinr, &empty)?)?;
            let report = serde_json::json!({
                "samples": cg.len(),
                "entries": [],
                "pass": serde_json::Value::Null,
                "note": "no reference curves supplied",
            });
            write(&out.join(REPORT_FILE), &(serde_json::to_string_pretty(&report).unwrap() + "\n"))?;
            eprintln!("no --reference given; wrote samples and percentile tables only");
            true
        }
    };
    eprintln!("{} drops, {} of {} samples retained", drops, output.samples.len(), output.generated);
    finalize(RunManifest::new("calibrate", Some(l.sha256), Some(l.seed), started), out)?;
    if !summary {
        eprintln!("calibration thresholds not met");
    }
    Ok(())
}

fn write_samples(path: &Path, samples: &[crate::kpi::KpiSample]) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = SampleWriter::new(BufWriter::new(file));
    for s in samples {
        engine::KpiSink::record(&mut w, s);
    }
    w.finish().map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    Ok(())
}

/// Timeline run. Tick samples stream straight to disk.
pub fn run(scenario: &Path, seed: Option<u64>, out: &Path) -> Result<(), CliError> {
    let started = unix_now();
    let l = load(scenario, seed)?;
    prepare_out(out)?;
    write(&out.join(SCENARIO_COPY), &l.text)?;
    let samples_path = out.join(dataset::TICK_SAMPLES_FILE);
    let file = File::create(&samples_path).map_err(io_err(&samples_path))?;
    let mut sink = SampleWriter::new(BufWriter::new(file));
    let output = engine::run_timeline(&l.spec, l.seed, &mut sink)?;
    sink.finish().map_err(|e| CliError::Runtime(format!("{}: {e}", samples_path.display())))?;

    let config = emit_config(&l.spec, &expand_x2(&l.spec), &output.deployment, l.seed);
    write(&out.join(CONFIG_FILE), &config)?;
    write(&out.join(DEPLOYMENT_FILE), &output.deployment.to_csv())?;
    dataset::write_csv(&out.join(dataset::HANDOVERS_FILE), &output.handovers)?;
    dataset::write_csv(&out.join(dataset::FAULT_LABELS_FILE), &output.labels)?;
    let info = RunInfo {
        environment: l.spec.environment,
        seed: l.seed,
        scenario_sha256: l.sha256.clone(),
        simulation_time_s: l.spec.simulation_time,
        tick_s: l.spec.params.tick_s,
        ticks: output.ticks,
        bins: l.spec.bins(),
        sites: output.deployment.sites.len(),
        cell_sites: l.spec.cell_sites(),
        adjacency: output.deployment.site_adjacency(),
    };
    write(&out.join(dataset::RUN_INFO_FILE), &(info.to_json() + "\n"))?;
    let executed = output.handovers.iter().filter(|h| h.executed).count();
    eprintln!(
        "{} ticks, {} UEs, {} handovers ({} refused), {} anomalous site-seconds",
        output.ticks,
        output.deployment.ues.len(),
        executed,
        output.handovers.len() - executed,
        output.labels.len()
    );
    finalize(RunManifest::new("run", Some(l.sha256), Some(l.seed), started), out)
}

/// Builds the dataset from a run directory.
pub fn export(run_dir: &Path, out: &Path) -> Result<(), CliError> {
    let started = unix_now();
    let (info, data) = dataset::dataset_from_run(run_dir)?;
    prepare_out(out)?;
    data.write(out)?;
    eprintln!(
        "{} site rows, {} UE rows, anomalous share {:.4}",
        data.bs_rows.len(),
        data.ue_rows.len(),
        data.anomalous_fraction()
    );
    finalize(RunManifest::new("export", Some(info.scenario_sha256), Some(info.seed), started), out)
}

/// CSV of LOS probability and LOS/NLOS path loss against 2-D distance at
/// the environment's default heights and carrier, in permissive mode.
pub fn channel_table_csv(env: Environment, from: f64, to: f64, step: f64, ue_height: f64) -> Result<String, CliError> {
    if !(step > 0.0) || !(to >= from) || !(from >= 0.0) || !to.is_finite() {
        return Err(CliError::Usage("need 0 <= from <= to and step > 0".into()));
    }
    if !(ue_height > 0.0) {
        return Err(CliError::Usage("ue height must be positive".into()));
    }
    let p = RadioParams::for_environment(env);
    let model = PathLossModel::from_params(&p);
    let mut out = String::from("d2d_m,p_los,path_loss_los_db,path_loss_nlos_db\n");
    let n = ((to - from) / step + 1e-9).floor() as u64;
    for k in 0..=n {
        let d = from + k as f64 * step;
        let geom = LinkGeometry::new(d, p.bs_height_m, ue_height, 0.0, 0.0, 0.0);
        let los = model.path_loss(true, &geom, p.carrier_ghz).map_err(|e| CliError::Runtime(e.to_string()))?;
        let nlos = model.path_loss(false, &geom, p.carrier_ghz).map_err(|e| CliError::Runtime(e.to_string()))?;
        out.push_str(&format!("{d},{},{los},{nlos}\n", los_probability(env.propagation(), d, ue_height)));
    }
    Ok(out)
}

fn channel_table(env: Environment, from: f64, to: f64, step: f64, ue_height: f64, out: Option<&Path>) -> Result<(), CliError> {
    let csv = channel_table_csv(env, from, to, step, ue_height)?;
    match out {
        Some(path) => write(path, &csv),
        None => io::stdout().write_all(csv.as_bytes()).map_err(|e| CliError::Runtime(e.to_string())),
    }
}
