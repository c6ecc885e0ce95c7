//! Per-base-station labeled KPI time series.
//!
//! Tick samples are reduced in three steps, each an arithmetic mean in the
//! dB domain: per UE over one-second bins, per sector over the UEs it
//! serves at the end of the bin, and per site over its sectors. Bins with
//! no data are kept as rows with empty KPI fields and `is_missing = 1`.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::engine::fault::{FaultKind, FaultLabel, MAX_ANOMALOUS_FRACTION};
use crate::engine::{HandoverEvent, KpiSink};
use crate::geometry::Point;
use crate::kpi::KpiSample;
use crate::params::Environment;

/// Files of a run directory.
pub const RUN_INFO_FILE: &str = "run.json";
pub const TICK_SAMPLES_FILE: &str = "ue_kpis.csv";
pub const HANDOVERS_FILE: &str = "handovers.csv";
pub const FAULT_LABELS_FILE: &str = "fault_labels.csv";

/// Files of a dataset directory.
pub const BS_KPIS_FILE: &str = "bs_kpis.csv";
pub const ADJACENCY_FILE: &str = "adjacency.csv";
pub const UE_SERIES_FILE: &str = "ue_kpis.csv";

/// Aggregated KPIs, in `bs_kpis.csv` column order.
pub const KPI_COLUMNS: [&str; 5] = ["rsrp_dbm", "rsrq_db", "sinr_db", "coupling_gain_db", "serving_distance_m"];

pub type KpiVector = [f64; 5];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("anomalous share {fraction:.4} exceeds the {limit} budget")]
    AnomalyBudget { fraction: f64, limit: f64 },
    #[error("{0}")]
    Inconsistent(String),
}

impl DatasetError {
    fn io(path: &Path) -> impl FnOnce(io::Error) -> Self + '_ {
        move |source| DatasetError::Io { path: path.to_path_buf(), source }
    }

    fn csv(path: &Path) -> impl FnOnce(csv::Error) -> Self + '_ {
        move |source| DatasetError::Csv { path: path.to_path_buf(), source }
    }
}

/// One-second bin containing `t`. The small offset absorbs tick clocks
/// that land a hair below an integer.
pub fn time_bin(t: f64) -> u64 {
    (t + 1e-6).floor().max(0.0) as u64
}

fn kpi_vector(s: &KpiSample) -> KpiVector {
    [s.rsrp, s.rsrq, s.sinr, s.coupling_gain, s.serving_distance]
}

fn mean_of<'a>(values: impl IntoIterator<Item = &'a KpiVector>) -> Option<KpiVector> {
    let mut sum = [0.0; 5];
    let mut n = 0usize;
    for v in values {
        for k in 0..5 {
            sum[k] += v[k];
        }
        n += 1;
    }
    (n > 0).then(|| sum.map(|s| s / n as f64))
}

/// Per-tick sample as stored in a run directory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickRow {
    pub time_s: f64,
    pub drop: u32,
    pub ue_id: u32,
    pub serving_cell: u32,
    pub serving_site: u32,
    pub x: f64,
    pub y: f64,
    pub serving_distance_m: f64,
    pub rsrp_dbm: f64,
    pub rsrq_db: f64,
    pub sinr_db: f64,
    pub coupling_gain_db: f64,
}

impl From<&KpiSample> for TickRow {
    fn from(s: &KpiSample) -> Self {
        TickRow {
            time_s: s.time,
            drop: s.drop,
            ue_id: s.ue_id,
            serving_cell: s.serving_cell,
            serving_site: s.serving_site,
            x: s.position.x,
            y: s.position.y,
            serving_distance_m: s.serving_distance,
            rsrp_dbm: s.rsrp,
            rsrq_db: s.rsrq,
            sinr_db: s.sinr,
            coupling_gain_db: s.coupling_gain,
        }
    }
}

impl From<TickRow> for KpiSample {
    fn from(r: TickRow) -> Self {
        KpiSample {
            time: r.time_s,
            drop: r.drop,
            ue_id: r.ue_id,
            serving_cell: r.serving_cell,
            serving_site: r.serving_site,
            position: Point::new(r.x, r.y),
            serving_distance: r.serving_distance_m,
            rsrp: r.rsrp_dbm,
            rsrq: r.rsrq_db,
            sinr: r.sinr_db,
            coupling_gain: r.coupling_gain_db,
        }
    }
}

/// Streams samples to CSV. I/O errors are held until [`SampleWriter::finish`].
pub struct SampleWriter<W: Write> {
    writer: csv::Writer<W>,
    error: Option<csv::Error>,
    rows: u64,
}

impl<W: Write> SampleWriter<W> {
    pub fn new(inner: W) -> Self {
        Self { writer: csv::Writer::from_writer(inner), error: None, rows: 0 }
    }

    pub fn finish(mut self) -> Result<u64, csv::Error> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        if self.rows == 0 {
            self.writer.write_record(TickRow::HEADER)?;
        }
        self.writer.flush()?;
        Ok(self.rows)
    }
}

impl<W: Write> KpiSink for SampleWriter<W> {
    fn record(&mut self, sample: &KpiSample) {
        if self.error.is_none() {
            match self.writer.serialize(TickRow::from(sample)) {
                Ok(()) => self.rows += 1,
                Err(e) => self.error = Some(e),
            }
        }
    }
}

/// A row type with a fixed CSV header. csv only writes headers along with
/// the first record, so empty tables need the names spelled out.
pub trait CsvTable: Serialize {
    const HEADER: &'static [&'static str];
}

impl CsvTable for TickRow {
    const HEADER: &'static [&'static str] = &[
        "time_s", "drop", "ue_id", "serving_cell", "serving_site", "x", "y", "serving_distance_m", "rsrp_dbm", "rsrq_db",
        "sinr_db", "coupling_gain_db",
    ];
}

impl CsvTable for UeSeriesRow {
    const HEADER: &'static [&'static str] = &[
        "time_s", "ue_id", "serving_cell", "bs_id", "rsrp_dbm", "rsrq_db", "sinr_db", "coupling_gain_db",
        "serving_distance_m",
    ];
}

impl CsvTable for BsRow {
    const HEADER: &'static [&'static str] = &[
        "time_s", "bs_id", "rsrp_dbm", "rsrq_db", "sinr_db", "coupling_gain_db", "serving_distance_m", "is_anomalous",
        "fault_kind", "is_missing",
    ];
}

impl CsvTable for AdjacencyRow {
    const HEADER: &'static [&'static str] = &["bs_a", "bs_b"];
}

impl CsvTable for FaultLabel {
    const HEADER: &'static [&'static str] = &["bs_id", "time_bin", "kind", "is_anomalous"];
}

impl CsvTable for HandoverEvent {
    const HEADER: &'static [&'static str] = &["time", "ue_id", "from_cell", "to_cell", "trigger", "executed"];
}

/// Writes `rows` to `path` as CSV; empty inputs produce a header-only file.
pub fn write_csv<T: CsvTable>(path: &Path, rows: &[T]) -> Result<(), DatasetError> {
    let file = File::create(path).map_err(DatasetError::io(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    if rows.is_empty() {
        w.write_record(T::HEADER).map_err(DatasetError::csv(path))?;
    }
    for r in rows {
        w.serialize(r).map_err(DatasetError::csv(path))?;
    }
    w.flush().map_err(DatasetError::io(path))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, DatasetError> {
    let file = File::open(path).map_err(DatasetError::io(path))?;
    let mut r = csv::Reader::from_reader(BufReader::new(file));
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(DatasetError::csv(path))
}

/// A UE's mean KPIs over one bin and the cell serving it at the bin's
/// last sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeBin {
    pub bin: u64,
    pub ue_id: u32,
    pub serving_cell: u32,
    pub serving_site: u32,
    pub values: KpiVector,
}

#[derive(Debug, Clone, Copy)]
struct BinAccumulator {
    sum: KpiVector,
    count: u32,
    last_time: f64,
    serving_cell: u32,
    serving_site: u32,
}

/// Step one as a streaming sink.
#[derive(Debug, Default)]
pub struct UeBinner {
    bins: BTreeMap<(u64, u32), BinAccumulator>,
}

impl KpiSink for UeBinner {
    fn record(&mut self, s: &KpiSample) {
        let v = kpi_vector(s);
        let acc = self.bins.entry((time_bin(s.time), s.ue_id)).or_insert(BinAccumulator {
            sum: [0.0; 5],
            count: 0,
            last_time: f64::NEG_INFINITY,
            serving_cell: s.serving_cell,
            serving_site: s.serving_site,
        });
        for k in 0..5 {
            acc.sum[k] += v[k];
        }
        acc.count += 1;
        if s.time >= acc.last_time {
            acc.last_time = s.time;
            acc.serving_cell = s.serving_cell;
            acc.serving_site = s.serving_site;
        }
    }
}

impl UeBinner {
    /// Bins ordered by (bin, UE).
    pub fn finish(self) -> Vec<UeBin> {
        self.bins
            .into_iter()
            .map(|((bin, ue_id), a)| UeBin {
                bin,
                ue_id,
                serving_cell: a.serving_cell,
                serving_site: a.serving_site,
                values: a.sum.map(|s| s / a.count as f64),
            })
            .collect()
    }
}

/// Step one: per-UE one-second means. Samples of one UE must arrive in
/// time order.
pub fn bin_and_average<'a>(samples: impl IntoIterator<Item = &'a KpiSample>) -> Vec<UeBin> {
    let mut b = UeBinner::default();
    for s in samples {
        b.record(s);
    }
    b.finish()
}

/// Sector mean for one bin; `None` when no UE was attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBin {
    pub bin: u64,
    pub cell: u32,
    pub site: u32,
    pub values: Option<KpiVector>,
}

/// Step two: one row per (bin, cell) for `bins` bins and every cell in
/// `cell_sites`.
pub fn aggregate_sector(ue_bins: &[UeBin], cell_sites: &[u32], bins: u64) -> Vec<SectorBin> {
    let mut grouped: BTreeMap<(u64, u32), Vec<(u32, KpiVector)>> = BTreeMap::new();
    for u in ue_bins.iter().filter(|u| u.bin < bins) {
        grouped.entry((u.bin, u.serving_cell)).or_default().push((u.ue_id, u.values));
    }
    let mut out = Vec::with_capacity(bins as usize * cell_sites.len());
    for bin in 0..bins {
        for (cell, site) in cell_sites.iter().enumerate() {
            let values = grouped.get_mut(&(bin, cell as u32)).and_then(|members| {
                // fixed summation order makes the mean independent of input order
                members.sort_by_key(|m| m.0);
                mean_of(members.iter().map(|m| &m.1))
            });
            out.push(SectorBin { bin, cell: cell as u32, site: *site, values });
        }
    }
    out
}

/// Site mean for one bin; `None` when every sector was missing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsBin {
    pub bin: u64,
    pub bs_id: u32,
    pub values: Option<KpiVector>,
}

/// Step three: one row per (bin, site), skipping missing sectors.
pub fn aggregate_bs(sectors: &[SectorBin], sites: usize, bins: u64) -> Vec<BsBin> {
    let mut grouped: BTreeMap<(u64, u32), Vec<(u32, KpiVector)>> = BTreeMap::new();
    for s in sectors {
        if let Some(v) = s.values {
            grouped.entry((s.bin, s.site)).or_default().push((s.cell, v));
        }
    }
    let mut out = Vec::with_capacity(bins as usize * sites);
    for bin in 0..bins {
        for site in 0..sites as u32 {
            let values = grouped.get_mut(&(bin, site)).and_then(|members| {
                members.sort_by_key(|m| m.0);
                mean_of(members.iter().map(|m| &m.1))
            });
            out.push(BsBin { bin, bs_id: site, values });
        }
    }
    out
}

/// A `bs_kpis.csv` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsRow {
    pub time_s: u64,
    pub bs_id: u32,
    pub rsrp_dbm: Option<f64>,
    pub rsrq_db: Option<f64>,
    pub sinr_db: Option<f64>,
    pub coupling_gain_db: Option<f64>,
    pub serving_distance_m: Option<f64>,
    pub is_anomalous: u8,
    pub fault_kind: String,
    pub is_missing: u8,
}

impl BsRow {
    pub fn values(&self) -> Option<KpiVector> {
        Some([self.rsrp_dbm?, self.rsrq_db?, self.sinr_db?, self.coupling_gain_db?, self.serving_distance_m?])
    }
}

/// Joins site series with ground-truth labels.
pub fn label_rows(series: &[BsBin], labels: &[FaultLabel]) -> Vec<BsRow> {
    let by_key: BTreeMap<(u64, u32), FaultKind> =
        labels.iter().filter(|l| l.is_anomalous).map(|l| ((l.time_bin, l.bs_id), l.kind)).collect();
    series
        .iter()
        .map(|b| {
            let kind = by_key.get(&(b.bin, b.bs_id));
            let v = b.values;
            BsRow {
                time_s: b.bin,
                bs_id: b.bs_id,
                rsrp_dbm: v.map(|v| v[0]),
                rsrq_db: v.map(|v| v[1]),
                sinr_db: v.map(|v| v[2]),
                coupling_gain_db: v.map(|v| v[3]),
                serving_distance_m: v.map(|v| v[4]),
                is_anomalous: kind.is_some() as u8,
                fault_kind: kind.map(|k| k.name().to_string()).unwrap_or_default(),
                is_missing: v.is_none() as u8,
            }
        })
        .collect()
}

/// A per-UE one-second row of the dataset's `ue_kpis.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UeSeriesRow {
    pub time_s: u64,
    pub ue_id: u32,
    pub serving_cell: u32,
    pub bs_id: u32,
    pub rsrp_dbm: f64,
    pub rsrq_db: f64,
    pub sinr_db: f64,
    pub coupling_gain_db: f64,
    pub serving_distance_m: f64,
}

impl From<&UeBin> for UeSeriesRow {
    fn from(u: &UeBin) -> Self {
        let v = u.values;
        UeSeriesRow {
            time_s: u.bin,
            ue_id: u.ue_id,
            serving_cell: u.serving_cell,
            bs_id: u.serving_site,
            rsrp_dbm: v[0],
            rsrq_db: v[1],
            sinr_db: v[2],
            coupling_gain_db: v[3],
            serving_distance_m: v[4],
        }
    }
}

impl From<&UeSeriesRow> for UeBin {
    fn from(r: &UeSeriesRow) -> Self {
        UeBin {
            bin: r.time_s,
            ue_id: r.ue_id,
            serving_cell: r.serving_cell,
            serving_site: r.bs_id,
            values: [r.rsrp_dbm, r.rsrq_db, r.sinr_db, r.coupling_gain_db, r.serving_distance_m],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyRow {
    pub bs_a: u32,
    pub bs_b: u32,
}

/// What a timeline run records about itself for later export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub environment: Environment,
    pub seed: u64,
    pub scenario_sha256: String,
    pub simulation_time_s: f64,
    pub tick_s: f64,
    pub ticks: u64,
    pub bins: u64,
    pub sites: usize,
    /// Site of every cell, indexed by cell id.
    pub cell_sites: Vec<u32>,
    pub adjacency: Vec<(u32, u32)>,
}

impl RunInfo {
    pub fn load(run_dir: &Path) -> Result<Self, DatasetError> {
        let path = run_dir.join(RUN_INFO_FILE);
        let text = fs::read_to_string(&path).map_err(DatasetError::io(&path))?;
        serde_json::from_str(&text).map_err(|source| DatasetError::Json { path, source })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run info serializes")
    }
}

/// The three output tables of an export.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub bs_rows: Vec<BsRow>,
    pub ue_rows: Vec<UeSeriesRow>,
    pub adjacency: Vec<AdjacencyRow>,
}

impl Dataset {
    pub fn anomalous_fraction(&self) -> f64 {
        if self.bs_rows.is_empty() {
            return 0.0;
        }
        self.bs_rows.iter().filter(|r| r.is_anomalous == 1).count() as f64 / self.bs_rows.len() as f64
    }

    /// Writes `bs_kpis.csv`, `adjacency.csv` and `ue_kpis.csv`.
    pub fn write(&self, out_dir: &Path) -> Result<Vec<PathBuf>, DatasetError> {
        fs::create_dir_all(out_dir).map_err(DatasetError::io(out_dir))?;
        let files = [out_dir.join(BS_KPIS_FILE), out_dir.join(ADJACENCY_FILE), out_dir.join(UE_SERIES_FILE)];
        write_csv(&files[0], &self.bs_rows)?;
        write_csv(&files[1], &self.adjacency)?;
        write_csv(&files[2], &self.ue_rows)?;
        Ok(files.to_vec())
    }
}

/// Runs the three aggregation steps and attaches labels. Fails when the
/// labels exceed the anomaly budget.
pub fn build_dataset(ue_bins: &[UeBin], info: &RunInfo, labels: &[FaultLabel]) -> Result<Dataset, DatasetError> {
    let sectors = aggregate_sector(ue_bins, &info.cell_sites, info.bins);
    let series = aggregate_bs(&sectors, info.sites, info.bins);
    let bs_rows = label_rows(&series, labels);
    let dataset = Dataset {
        bs_rows,
        ue_rows: ue_bins.iter().filter(|u| u.bin < info.bins).map(UeSeriesRow::from).collect(),
        adjacency: info.adjacency.iter().map(|&(bs_a, bs_b)| AdjacencyRow { bs_a, bs_b }).collect(),
    };
    let fraction = dataset.anomalous_fraction();
    if fraction > MAX_ANOMALOUS_FRACTION {
        return Err(DatasetError::AnomalyBudget { fraction, limit: MAX_ANOMALOUS_FRACTION });
    }
    Ok(dataset)
}

/// Reads a run directory and builds its dataset. Tick samples are
/// streamed, so memory grows with UE-seconds rather than ticks.
pub fn dataset_from_run(run_dir: &Path) -> Result<(RunInfo, Dataset), DatasetError> {
    let info = RunInfo::load(run_dir)?;
    let path = run_dir.join(TICK_SAMPLES_FILE);
    let file = File::open(&path).map_err(DatasetError::io(&path))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let mut binner = UeBinner::default();
    for row in reader.deserialize::<TickRow>() {
        let row = row.map_err(DatasetError::csv(&path))?;
        if row.serving_cell as usize >= info.cell_sites.len() {
            return Err(DatasetError::Inconsistent(format!("sample references unknown cell {}", row.serving_cell)));
        }
        binner.record(&KpiSample::from(row));
    }
    let labels: Vec<FaultLabel> = read_csv(&run_dir.join(FAULT_LABELS_FILE))?;
    let dataset = build_dataset(&binner.finish(), &info, &labels)?;
    Ok((info, dataset))
}

/// Recomputes `bs_kpis.csv` rows from a dataset's `ue_kpis.csv`.
pub fn reaggregate(ue_rows: &[UeSeriesRow], info: &RunInfo, labels: &[FaultLabel]) -> Vec<BsRow> {
    let bins: Vec<UeBin> = ue_rows.iter().map(UeBin::from).collect();
    let sectors = aggregate_sector(&bins, &info.cell_sites, info.bins);
    label_rows(&aggregate_bs(&sectors, info.sites, info.bins), labels)
}
