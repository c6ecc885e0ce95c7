//! Empirical CDFs, the two-sample Kolmogorov-Smirnov distance, reference
//! percentile tables and the calibration report.
//!
//! A reference directory holds one CSV per curve with header
//! `percentile,value_db`. Files are named `coupling_gain_<name>.csv` and
//! `sinr_<name>.csv`; `<name>` becomes the reference name in the report.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::Environment;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("cannot build a CDF from zero samples")]
    EmptyInput,
    #[error("no {0} reference curve found")]
    MissingReference(CalibrationKpi),
    #[error("{path}: {message}")]
    BadReference { path: PathBuf, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationKpi {
    CouplingGain,
    WidebandSinr,
}

impl CalibrationKpi {
    pub const ALL: [CalibrationKpi; 2] = [CalibrationKpi::CouplingGain, CalibrationKpi::WidebandSinr];

    pub fn name(self) -> &'static str {
        match self {
            CalibrationKpi::CouplingGain => "coupling_gain",
            CalibrationKpi::WidebandSinr => "wideband_sinr",
        }
    }

    /// File-name prefix of reference tables.
    pub fn file_prefix(self) -> &'static str {
        match self {
            CalibrationKpi::CouplingGain => "coupling_gain_",
            CalibrationKpi::WidebandSinr => "sinr_",
        }
    }
}

impl fmt::Display for CalibrationKpi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Right-continuous step function (sample ECDF).
    Step,
    /// Linear between points; 0 below the first value and 1 from the last
    /// value on.
    Linear,
}

/// A cumulative distribution given by sorted values and their
/// probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfCurve {
    values: Vec<f64>,
    probs: Vec<f64>,
    interpolation: Interpolation,
}

/// Sample ECDF. Ties collapse into a single step.
pub fn empirical_cdf(samples: &[f64]) -> Result<CdfCurve, CalibrationError> {
    if samples.is_empty() {
        return Err(CalibrationError::EmptyInput);
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut values = Vec::new();
    let mut probs = Vec::new();
    for (i, v) in sorted.iter().enumerate() {
        if values.last() == Some(v) {
            *probs.last_mut().unwrap() = (i + 1) as f64 / n;
        } else {
            values.push(*v);
            probs.push((i + 1) as f64 / n);
        }
    }
    Ok(CdfCurve { values, probs, interpolation: Interpolation::Step })
}

impl CdfCurve {
    /// Piecewise-linear curve through `(value, probability)` points, as in a
    /// percentile table. Values must be non-decreasing and probabilities
    /// strictly increasing inside (0, 1].
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self, String> {
        if points.is_empty() {
            return Err("no points".into());
        }
        for w in points.windows(2) {
            if !(w[1].0 >= w[0].0) {
                return Err(format!("values must be non-decreasing ({} after {})", w[1].0, w[0].0));
            }
            if !(w[1].1 > w[0].1) {
                return Err(format!("probabilities must increase ({} after {})", w[1].1, w[0].1));
            }
        }
        if points.iter().any(|(v, p)| !v.is_finite() || !(*p > 0.0 && *p <= 1.0)) {
            return Err("values must be finite and probabilities in (0, 1]".into());
        }
        Ok(Self {
            values: points.iter().map(|p| p.0).collect(),
            probs: points.iter().map(|p| p.1).collect(),
            interpolation: Interpolation::Linear,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    /// F(x).
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.values.partition_point(|v| *v <= x);
        match self.interpolation {
            Interpolation::Step => if i == 0 { 0.0 } else { self.probs[i - 1] },
            Interpolation::Linear => {
                if i == 0 {
                    0.0
                } else if i == self.values.len() {
                    1.0
                } else {
                    self.lerp(i, x)
                }
            }
        }
    }

    /// lim F(y) as y approaches x from below.
    pub fn eval_left(&self, x: f64) -> f64 {
        let j = self.values.partition_point(|v| *v < x);
        match self.interpolation {
            Interpolation::Step => if j == 0 { 0.0 } else { self.probs[j - 1] },
            Interpolation::Linear => {
                if j == 0 {
                    0.0
                } else if j == self.values.len() {
                    1.0
                } else {
                    self.lerp(j, x)
                }
            }
        }
    }

    // interpolate on the segment [values[i-1], values[i]]
    fn lerp(&self, i: usize, x: f64) -> f64 {
        let (x0, x1) = (self.values[i - 1], self.values[i]);
        let (p0, p1) = (self.probs[i - 1], self.probs[i]);
        if x1 == x0 {
            return p1;
        }
        p0 + (p1 - p0) * (x - x0) / (x1 - x0)
    }

    /// Smallest tabulated value whose probability reaches `p`. For a step
    /// curve this is the usual sample quantile.
    pub fn quantile(&self, p: f64) -> f64 {
        let i = self.probs.partition_point(|q| *q < p - 1e-12);
        self.values[i.min(self.values.len() - 1)]
    }
}

/// sup over x of |F_a(x) − F_b(x)|.
///
/// Both curves are monotone and piecewise linear or constant between the
/// union of their breakpoints, so the supremum is attained at a
/// breakpoint, either at the value or as a left limit.
pub fn ks_statistic(a: &CdfCurve, b: &CdfCurve) -> f64 {
    let mut d: f64 = 0.0;
    for x in a.values.iter().chain(&b.values) {
        d = d.max((a.eval(*x) - b.eval(*x)).abs());
        d = d.max((a.eval_left(*x) - b.eval_left(*x)).abs());
    }
    d.min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub kpi: CalibrationKpi,
    pub reference_name: String,
    pub statistic: f64,
}

/// Maximum KS distance accepted per KPI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub coupling_gain: f64,
    pub wideband_sinr: f64,
}

impl Thresholds {
    /// Per-environment KS limits on the reference comparison.
    pub fn for_environment(env: Environment) -> Self {
        match env {
            Environment::UrbanEmbb => Thresholds { coupling_gain: 0.13, wideband_sinr: 0.28 },
            Environment::RuralEmbb => Thresholds { coupling_gain: 0.18, wideband_sinr: 0.32 },
        }
    }

    pub fn get(&self, kpi: CalibrationKpi) -> f64 {
        match kpi {
            CalibrationKpi::CouplingGain => self.coupling_gain,
            CalibrationKpi::WidebandSinr => self.wideband_sinr,
        }
    }
}

/// Named reference curves per KPI.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReferenceSet {
    pub coupling_gain: Vec<(String, CdfCurve)>,
    pub wideband_sinr: Vec<(String, CdfCurve)>,
}

impl ReferenceSet {
    pub fn get(&self, kpi: CalibrationKpi) -> &[(String, CdfCurve)] {
        match kpi {
            CalibrationKpi::CouplingGain => &self.coupling_gain,
            CalibrationKpi::WidebandSinr => &self.wideband_sinr,
        }
    }

    fn get_mut(&mut self, kpi: CalibrationKpi) -> &mut Vec<(String, CdfCurve)> {
        match kpi {
            CalibrationKpi::CouplingGain => &mut self.coupling_gain,
            CalibrationKpi::WidebandSinr => &mut self.wideband_sinr,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coupling_gain.is_empty() && self.wideband_sinr.is_empty()
    }

    /// Loads every `coupling_gain_*.csv` and `sinr_*.csv` under `dir`,
    /// sorted by name.
    pub fn load_dir(dir: &Path) -> Result<Self, CalibrationError> {
        let mut set = ReferenceSet::default();
        let mut entries: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
        entries.sort();
        for path in entries {
            let Some(file) = path.file_name().and_then(|f| f.to_str()) else { continue };
            let Some(stem) = file.strip_suffix(".csv") else { continue };
            for kpi in CalibrationKpi::ALL {
                if let Some(name) = stem.strip_prefix(kpi.file_prefix()) {
                    let text = fs::read_to_string(&path)?;
                    let curve = parse_percentile_table(&text)
                        .map_err(|message| CalibrationError::BadReference { path: path.clone(), message })?;
                    set.get_mut(kpi).push((name.to_string(), curve));
                }
            }
        }
        Ok(set)
    }
}

/// Parses a `percentile,value_db` table into a linear curve.
pub fn parse_percentile_table(text: &str) -> Result<CdfCurve, String> {
    #[derive(Deserialize)]
    struct Row {
        percentile: f64,
        value_db: f64,
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| format!("row {}: {e}", i + 1))?;
        if !(row.percentile > 0.0 && row.percentile <= 100.0) {
            return Err(format!("row {}: percentile {} outside (0, 100]", i + 1, row.percentile));
        }
        points.push((row.value_db, row.percentile / 100.0));
    }
    points.sort_by(|a, b| a.1.total_cmp(&b.1));
    CdfCurve::from_points(&points)
}

/// Writes `curve` as a percentile table at percentiles 1..=99.
pub fn percentile_table(curve: &CdfCurve) -> String {
    let mut out = String::from("percentile,value_db\n");
    for p in 1..=99 {
        out.push_str(&format!("{p},{}\n", curve.quantile(p as f64 / 100.0)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    #[serde(flatten)]
    pub result: KsResult,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub samples: usize,
    pub entries: Vec<ReportEntry>,
    /// True when every KPI has a reference and every KS distance is within
    /// its threshold.
    pub pass: bool,
}

impl CalibrationReport {
    pub fn worst(&self, kpi: CalibrationKpi) -> Option<f64> {
        self.entries.iter().filter(|e| e.result.kpi == kpi).map(|e| e.result.statistic).reduce(f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Compares the run's coupling-gain and SINR samples with every
/// reference curve.
pub fn calibration_report(
    coupling_gain: &[f64],
    sinr: &[f64],
    references: &ReferenceSet,
    thresholds: Thresholds,
) -> Result<CalibrationReport, CalibrationError> {
    let mut entries = Vec::new();
    for kpi in CalibrationKpi::ALL {
        let refs = references.get(kpi);
        if refs.is_empty() {
            return Err(CalibrationError::MissingReference(kpi));
        }
        let samples = match kpi {
            CalibrationKpi::CouplingGain => coupling_gain,
            CalibrationKpi::WidebandSinr => sinr,
        };
        let run = empirical_cdf(samples)?;
        for (name, curve) in refs {
            let statistic = ks_statistic(&run, curve);
            let threshold = thresholds.get(kpi);
            entries.push(ReportEntry {
                result: KsResult { kpi, reference_name: name.clone(), statistic },
                threshold,
                pass: statistic <= threshold,
            });
        }
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(CalibrationReport { samples: coupling_gain.len(), entries, pass })
}

/// CDF overlay for plotting: `kpi,source,value_db,cdf`. The run curve is
/// sampled at every percentile; references are written point by point.
pub fn overlay_csv(coupling_gain: &[f64], sinr: &[f64], references: &ReferenceSet) -> Result<String, CalibrationError> {
    let mut out = String::from("kpi,source,value_db,cdf\n");
    for kpi in CalibrationKpi::ALL {
        let samples = match kpi {
            CalibrationKpi::CouplingGain => coupling_gain,
            CalibrationKpi::WidebandSinr => sinr,
        };
        let run = empirical_cdf(samples)?;
        for p in 0..=100 {
            let q = (p as f64 / 100.0).max(1e-9);
            let v = run.quantile(q);
            out.push_str(&format!("{},run,{v},{}\n", kpi.name(), run.eval(v)));
        }
        for (name, curve) in references.get(kpi) {
            for (v, p) in curve.values.iter().zip(&curve.probs) {
                out.push_str(&format!("{},{name},{v},{p}\n", kpi.name()));
            }
        }
    }
    Ok(out)
}
