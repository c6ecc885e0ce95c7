//! Scenario compiler: YAML description → validated [`ScenarioSpec`] →
//! X2 plan → long-form configuration text.
//!
//! The YAML schema (all keys lower_snake_case, unknown keys rejected):
//!
//! ```yaml
//! environment: urban_embb          # or rural_embb
//! simulation_time_s: 600
//! seed: 7                          # optional here, then required on the CLI
//! sites:
//!   - {x: 0, y: 0, sectors: 3}     # azimuths default to 30/150/270
//!   - {x: 200, y: 0, sectors: 1, azimuths: [90]}
//! x2: all-to-all                   # or [[0, 1], [1, 2]]
//! users: {per_sector: 10, max_distance_m: 50}
//! background: {cells: 2, users_per_cell: 10, area: {x0: 0, y0: 0, x1: 500, y1: 500}}
//! kpis: [rsrp, rsrq, sinr, coupling_gain, serving_distance, position]
//! faults:
//!   - {type: excessive_power_reduction, cell: 4, start_s: 100, end_s: 110, magnitude_db: 20}
//!   - {type: too_late_handover, cell: 7, start_s: 200, end_s: 210, hysteresis_db: 9, ttt_s: 1.0}
//!   - {type: inter_cell_interference, cell: 9, start_s: 300, end_s: 310, magnitude_db: -90}
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::fault::{self, FaultEffect, FaultKind, FaultSpec};
use crate::geometry::{Point, Rect};
use crate::kpi::Kpi;
use crate::params::{Environment, IndoorHeight, RadioParams};
use crate::topology::{self, Deployment};

pub const DEFAULT_AZIMUTHS: [f64; 3] = [30.0, 150.0, 270.0];

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("invalid value at `{path}`: {message}")]
    Validation { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CompileError {
    fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        CompileError::Validation { path: path.into(), message: message.into() }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            CompileError::Schema { path, .. } | CompileError::Validation { path, .. } => Some(path),
            CompileError::Io(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiteDecl {
    pub position: Point,
    pub sector_azimuths: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundDecl {
    pub cell_count: usize,
    pub users_per_cell: usize,
    pub area: Rect,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum X2Policy {
    AllToAll,
    ExplicitPairs(Vec<(u32, u32)>),
}

/// Validated scenario. `params` holds the environment defaults and is the
/// place to tune anything the YAML does not expose.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub environment: Environment,
    pub simulation_time: f64,
    pub seed: Option<u64>,
    pub sites: Vec<SiteDecl>,
    pub x2_policy: X2Policy,
    pub users_per_sector: usize,
    pub max_ue_distance: f64,
    pub background: BackgroundDecl,
    pub kpis: BTreeSet<Kpi>,
    pub faults: Vec<FaultSpec>,
    pub params: RadioParams,
}

impl ScenarioSpec {
    /// Tri-sector hexagonal grid with `rings` rings at the environment's
    /// inter-site distance, no faults, no background, all KPIs.
    pub fn hex_grid(environment: Environment, rings: u32, users_per_sector: usize) -> Self {
        let params = RadioParams::for_environment(environment);
        let sites = topology::hex_layout(rings, params.isd_m, params.bs_height_m)
            .into_iter()
            .map(|s| SiteDecl { position: s.position, sector_azimuths: DEFAULT_AZIMUTHS.to_vec() })
            .collect();
        Self {
            environment,
            simulation_time: 60.0,
            seed: None,
            sites,
            x2_policy: X2Policy::AllToAll,
            users_per_sector,
            max_ue_distance: params.max_ue_distance_m,
            background: BackgroundDecl {
                cell_count: 0,
                users_per_cell: params.background_users_per_cell,
                area: Rect::new(0.0, 0.0, 0.0, 0.0),
            },
            kpis: Kpi::ALL.into_iter().collect(),
            faults: Vec::new(),
            params,
        }
    }

    /// The 19-site, 57-cell calibration layout with 10 UEs per sector.
    pub fn calibration(environment: Environment) -> Self {
        Self::hex_grid(environment, 2, 10)
    }

    pub fn cell_count(&self) -> usize {
        self.sites.iter().map(|s| s.sector_azimuths.len()).sum()
    }

    pub fn ue_count(&self) -> usize {
        self.users_per_sector * self.cell_count()
    }

    /// Site owning each cell, in cell-id order.
    pub fn cell_sites(&self) -> Vec<u32> {
        self.sites
            .iter()
            .enumerate()
            .flat_map(|(i, s)| std::iter::repeat_n(i as u32, s.sector_azimuths.len()))
            .collect()
    }

    /// Number of one-second bins in the run.
    pub fn bins(&self) -> u64 {
        self.simulation_time.ceil() as u64
    }

    /// Serializes back to the YAML schema.
    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(&ScenarioDoc::from(self)).expect("scenario documents always serialize")
    }

    pub fn validate(&self) -> Result<(), CompileError> {
        if !(self.simulation_time > 0.0) || !self.simulation_time.is_finite() {
            return Err(CompileError::invalid("simulation_time_s", "must be a positive number of seconds"));
        }
        if self.sites.is_empty() {
            return Err(CompileError::invalid("sites", "at least one site is required"));
        }
        for (i, s) in self.sites.iter().enumerate() {
            let n = s.sector_azimuths.len();
            if !(1..=3).contains(&n) {
                return Err(CompileError::invalid(format!("sites[{i}].sectors"), "must be 1, 2 or 3"));
            }
            if let Some(a) = s.sector_azimuths.iter().find(|a| !(0.0..360.0).contains(*a)) {
                return Err(CompileError::invalid(format!("sites[{i}].azimuths"), format!("{a} is outside [0, 360)")));
            }
            if !s.position.x.is_finite() || !s.position.y.is_finite() {
                return Err(CompileError::invalid(format!("sites[{i}]"), "coordinates must be finite"));
            }
        }
        if let X2Policy::ExplicitPairs(pairs) = &self.x2_policy {
            let mut seen = BTreeSet::new();
            for (k, &(a, b)) in pairs.iter().enumerate() {
                let path = format!("x2[{k}]");
                if a as usize >= self.sites.len() || b as usize >= self.sites.len() {
                    return Err(CompileError::invalid(path, format!("references an undeclared site ({a}, {b})")));
                }
                if a == b {
                    return Err(CompileError::invalid(path, "self-pairs are not allowed"));
                }
                if !seen.insert((a.min(b), a.max(b))) {
                    return Err(CompileError::invalid(path, format!("duplicate pair ({a}, {b})")));
                }
            }
        }
        if !(self.max_ue_distance > self.params.min_ue_distance_m) {
            return Err(CompileError::invalid(
                "users.max_distance_m",
                format!("must exceed the minimum UE distance of {} m", self.params.min_ue_distance_m),
            ));
        }
        if self.background.cell_count > 0 && !(self.background.area.width() > 0.0 && self.background.area.height() > 0.0) {
            return Err(CompileError::invalid("background.area", "needs positive width and height"));
        }
        let cells = self.cell_count() as u32;
        for (i, f) in self.faults.iter().enumerate() {
            let path = |k: &str| format!("faults[{i}].{k}");
            if f.target_cell >= cells {
                return Err(CompileError::invalid(path("cell"), format!("cell {} does not exist ({cells} cells)", f.target_cell)));
            }
            if !(f.start_s >= 0.0 && f.start_s < f.end_s && f.end_s <= self.simulation_time) {
                return Err(CompileError::invalid(
                    path("end_s"),
                    format!("window [{}, {}] must satisfy 0 <= start < end <= {}", f.start_s, f.end_s, self.simulation_time),
                ));
            }
            match f.effect {
                FaultEffect::PowerReduction { drop_db } if !(drop_db > 0.0) => {
                    return Err(CompileError::invalid(path("magnitude_db"), "power drop must be positive"));
                }
                FaultEffect::LateHandover { hysteresis_db, ttt_s } if !(hysteresis_db >= 0.0 && ttt_s >= 0.0) => {
                    return Err(CompileError::invalid(path("hysteresis_db"), "hysteresis and TTT must be non-negative"));
                }
                FaultEffect::Interference { power_dbm } if !power_dbm.is_finite() => {
                    return Err(CompileError::invalid(path("magnitude_db"), "interference power must be finite"));
                }
                _ => {}
            }
        }
        let cell_sites = self.cell_sites();
        let frac = fault::anomalous_fraction(&self.faults, |c| cell_sites[c as usize], self.sites.len(), self.bins());
        if frac > fault::MAX_ANOMALOUS_FRACTION {
            return Err(CompileError::invalid(
                "faults",
                format!("fault windows label {:.2}% of site-seconds; at most 2% allowed", frac * 100.0),
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// YAML document

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    environment: Environment,
    simulation_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    sites: Vec<SiteDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x2: Option<X2Doc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    users: Option<UsersDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    background: Option<BackgroundDoc>,
    #[serde(default)]
    kpis: Vec<Kpi>,
    #[serde(default)]
    faults: Vec<FaultDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteDoc {
    x: f64,
    y: f64,
    #[serde(default = "three")]
    sectors: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    azimuths: Option<Vec<f64>>,
}

fn three() -> u32 {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum X2Doc {
    Keyword(String),
    Pairs(Vec<[u32; 2]>),
}

const ALL_TO_ALL: &str = "all-to-all";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UsersDoc {
    per_sector: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_distance_m: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BackgroundDoc {
    cells: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    users_per_cell: Option<usize>,
    area: AreaDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AreaDoc {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FaultDoc {
    #[serde(rename = "type")]
    kind: FaultKind,
    cell: u32,
    start_s: f64,
    end_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    magnitude_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hysteresis_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ttt_s: Option<f64>,
}

impl From<&ScenarioSpec> for ScenarioDoc {
    fn from(spec: &ScenarioSpec) -> Self {
        ScenarioDoc {
            environment: spec.environment,
            simulation_time_s: spec.simulation_time,
            seed: spec.seed,
            sites: spec
                .sites
                .iter()
                .map(|s| SiteDoc {
                    x: s.position.x,
                    y: s.position.y,
                    sectors: s.sector_azimuths.len() as u32,
                    azimuths: Some(s.sector_azimuths.clone()),
                })
                .collect(),
            x2: Some(match &spec.x2_policy {
                X2Policy::AllToAll => X2Doc::Keyword(ALL_TO_ALL.to_string()),
                X2Policy::ExplicitPairs(p) => X2Doc::Pairs(p.iter().map(|&(a, b)| [a, b]).collect()),
            }),
            users: Some(UsersDoc { per_sector: spec.users_per_sector, max_distance_m: Some(spec.max_ue_distance) }),
            background: Some(BackgroundDoc {
                cells: spec.background.cell_count,
                users_per_cell: Some(spec.background.users_per_cell),
                area: AreaDoc {
                    x0: spec.background.area.min.x,
                    y0: spec.background.area.min.y,
                    x1: spec.background.area.max.x,
                    y1: spec.background.area.max.y,
                },
            }),
            kpis: spec.kpis.iter().copied().collect(),
            faults: spec
                .faults
                .iter()
                .map(|f| {
                    let mut doc = FaultDoc {
                        kind: f.kind(),
                        cell: f.target_cell,
                        start_s: f.start_s,
                        end_s: f.end_s,
                        magnitude_db: None,
                        hysteresis_db: None,
                        ttt_s: None,
                    };
                    match f.effect {
                        FaultEffect::PowerReduction { drop_db } => doc.magnitude_db = Some(drop_db),
                        FaultEffect::Interference { power_dbm } => doc.magnitude_db = Some(power_dbm),
                        FaultEffect::LateHandover { hysteresis_db, ttt_s } => {
                            doc.hysteresis_db = Some(hysteresis_db);
                            doc.ttt_s = Some(ttt_s);
                        }
                    }
                    doc
                })
                .collect(),
        }
    }
}

fn build_spec(doc: ScenarioDoc) -> Result<ScenarioSpec, CompileError> {
    let params = RadioParams::for_environment(doc.environment);
    let mut sites = Vec::with_capacity(doc.sites.len());
    for (i, s) in doc.sites.into_iter().enumerate() {
        let azimuths = match s.azimuths {
            Some(a) => {
                if a.len() != s.sectors as usize {
                    return Err(CompileError::invalid(
                        format!("sites[{i}].azimuths"),
                        format!("{} azimuths given for {} sectors", a.len(), s.sectors),
                    ));
                }
                a
            }
            None => {
                if !(1..=3).contains(&s.sectors) {
                    return Err(CompileError::invalid(format!("sites[{i}].sectors"), "must be 1, 2 or 3"));
                }
                DEFAULT_AZIMUTHS[..s.sectors as usize].to_vec()
            }
        };
        sites.push(SiteDecl { position: Point::new(s.x, s.y), sector_azimuths: azimuths });
    }
    let x2_policy = match doc.x2 {
        None => X2Policy::ExplicitPairs(Vec::new()),
        Some(X2Doc::Keyword(k)) if k == ALL_TO_ALL => X2Policy::AllToAll,
        Some(X2Doc::Keyword(k)) => {
            return Err(CompileError::Schema {
                path: "x2".into(),
                message: format!("expected `{ALL_TO_ALL}` or a list of [i, j] pairs, found `{k}`"),
            })
        }
        Some(X2Doc::Pairs(p)) => X2Policy::ExplicitPairs(p.into_iter().map(|[a, b]| (a, b)).collect()),
    };
    let (users_per_sector, max_ue_distance) = match doc.users {
        Some(u) => (u.per_sector, u.max_distance_m.unwrap_or(params.max_ue_distance_m)),
        None => (0, params.max_ue_distance_m),
    };
    let background = match doc.background {
        Some(b) => BackgroundDecl {
            cell_count: b.cells,
            users_per_cell: b.users_per_cell.unwrap_or(params.background_users_per_cell),
            area: Rect::new(b.area.x0, b.area.y0, b.area.x1, b.area.y1),
        },
        None => BackgroundDecl {
            cell_count: 0,
            users_per_cell: params.background_users_per_cell,
            area: Rect::new(0.0, 0.0, 0.0, 0.0),
        },
    };
    let mut faults = Vec::with_capacity(doc.faults.len());
    for (i, f) in doc.faults.into_iter().enumerate() {
        let stray = |key: &str| CompileError::invalid(format!("faults[{i}].{key}"), format!("not a parameter of {}", f.kind.name()));
        let effect = match f.kind {
            FaultKind::ExcessivePowerReduction | FaultKind::InterCellInterference => {
                if f.hysteresis_db.is_some() {
                    return Err(stray("hysteresis_db"));
                }
                if f.ttt_s.is_some() {
                    return Err(stray("ttt_s"));
                }
                if f.kind == FaultKind::ExcessivePowerReduction {
                    FaultEffect::PowerReduction { drop_db: f.magnitude_db.unwrap_or(fault::DEFAULT_POWER_DROP_DB) }
                } else {
                    FaultEffect::Interference { power_dbm: f.magnitude_db.unwrap_or(fault::DEFAULT_INTERFERENCE_DBM) }
                }
            }
            FaultKind::TooLateHandover => {
                if f.magnitude_db.is_some() {
                    return Err(stray("magnitude_db"));
                }
                FaultEffect::LateHandover {
                    hysteresis_db: f.hysteresis_db.unwrap_or(fault::DEFAULT_LATE_HYSTERESIS_DB),
                    ttt_s: f.ttt_s.unwrap_or(fault::DEFAULT_LATE_TTT_S),
                }
            }
        };
        faults.push(FaultSpec { target_cell: f.cell, start_s: f.start_s, end_s: f.end_s, effect });
    }
    let spec = ScenarioSpec {
        environment: doc.environment,
        simulation_time: doc.simulation_time_s,
        seed: doc.seed,
        sites,
        x2_policy,
        users_per_sector,
        max_ue_distance,
        background,
        kpis: doc.kpis.into_iter().collect(),
        faults,
        params,
    };
    spec.validate()?;
    Ok(spec)
}

/// Parses and validates a YAML scenario description.
pub fn parse_scenario(yaml_text: &str) -> Result<ScenarioSpec, CompileError> {
    let de = serde_yaml::Deserializer::from_str(yaml_text);
    let doc: ScenarioDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CompileError::Schema { path: if path == "." { "<root>".into() } else { path }, message: e.into_inner().to_string() }
    })?;
    build_spec(doc)
}

// ---------------------------------------------------------------------------
// X2

/// X2 links and per-site port assignment.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct X2Plan {
    /// Unordered pairs stored as `(low, high)`, sorted.
    pub links: Vec<(u32, u32)>,
    /// For each site, `(port, peer)` in ascending port order.
    pub port_map: Vec<Vec<(u32, u32)>>,
}

impl X2Plan {
    pub fn connected(&self, a: u32, b: u32) -> bool {
        a == b || self.links.binary_search(&(a.min(b), a.max(b))).is_ok()
    }
}

/// Expands the X2 policy into links; each site numbers its ports from 0
/// in ascending peer order.
pub fn expand_x2(spec: &ScenarioSpec) -> X2Plan {
    let n = spec.sites.len() as u32;
    let mut links: Vec<(u32, u32)> = match &spec.x2_policy {
        X2Policy::AllToAll => (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect(),
        X2Policy::ExplicitPairs(pairs) => pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect(),
    };
    links.sort_unstable();
    links.dedup();
    let mut peers: Vec<Vec<u32>> = vec![Vec::new(); n as usize];
    for &(a, b) in &links {
        peers[a as usize].push(b);
        peers[b as usize].push(a);
    }
    let port_map = peers
        .into_iter()
        .map(|mut p| {
            p.sort_unstable();
            p.into_iter().enumerate().map(|(port, peer)| (port as u32, peer)).collect()
        })
        .collect();
    X2Plan { links, port_map }
}

// ---------------------------------------------------------------------------
// Emission

fn yes_no(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Renders the long-form configuration. The output depends only on its
/// inputs, so a deployment generated from the same `(spec, seed)` always
/// produces the same bytes.
pub fn emit_config(spec: &ScenarioSpec, plan: &X2Plan, deployment: &Deployment, seed: u64) -> String {
    let p = &spec.params;
    let mut o = String::new();
    macro_rules! kv {
        ($k:expr, $v:expr) => {
            writeln!(o, "{} = {}", $k, $v).unwrap()
        };
    }
    writeln!(o, "# ranforge {} long-form configuration", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(o, "# environment={} seed={}", spec.environment, seed).unwrap();
    o.push('\n');

    o.push_str("[General]\n");
    kv!("environment", spec.environment);
    kv!("simulation_time_s", spec.simulation_time);
    kv!("seed", seed);
    kv!("num_sites", deployment.sites.len());
    kv!("num_cells", deployment.cells.len());
    kv!("num_ues", deployment.ues.len());
    kv!("num_background_cells", deployment.background.len());
    kv!("num_background_ues", deployment.background.iter().map(|b| b.users.len()).sum::<usize>());
    kv!("num_x2_links", plan.links.len());
    kv!("num_faults", spec.faults.len());
    o.push('\n');

    o.push_str("[Parameters]\n");
    kv!("propagation_model", format!("{:?}", spec.environment.propagation()));
    kv!("carrier_frequency_ghz", p.carrier_ghz);
    kv!("bandwidth_mhz", p.bandwidth_mhz);
    kv!("resource_blocks", p.resource_blocks);
    kv!("subcarriers_per_rb", p.subcarriers_per_rb);
    kv!("inter_site_distance_m", p.isd_m);
    kv!("bs_antenna_height_m", p.bs_height_m);
    kv!("bs_tx_power_dbm", p.bs_tx_power_dbm);
    kv!("ue_tx_power_dbm", p.ue_tx_power_dbm);
    kv!("bs_antenna_element_gain_dbi", p.antenna.max_gain_dbi);
    kv!("bs_antenna_h_beamwidth_deg", p.antenna.h_beamwidth_deg);
    kv!("bs_antenna_v_beamwidth_deg", p.antenna.v_beamwidth_deg);
    kv!("bs_antenna_max_attenuation_db", p.antenna.max_attenuation_db);
    kv!("bs_antenna_side_lobe_db", p.antenna.side_lobe_db);
    kv!("bs_antenna_downtilt_deg", p.antenna.downtilt_deg);
    kv!("ue_antenna_gain_dbi", p.ue_antenna_gain_dbi);
    kv!("bs_noise_figure_db", p.bs_noise_figure_db);
    kv!("ue_noise_figure_db", p.ue_noise_figure_db);
    kv!("thermal_noise_dbm", p.thermal_noise_dbm);
    kv!("indoor_fraction", p.indoor_fraction);
    kv!("high_loss_fraction", p.high_loss_fraction);
    kv!("outdoor_ue_height_m", p.outdoor_ue_height_m);
    match p.indoor_height {
        IndoorHeight::Floors => kv!("indoor_ue_height", "floors"),
        IndoorHeight::Fixed(h) => kv!("indoor_ue_height", h),
    }
    kv!("indoor_ue_speed_kmh", p.indoor_speed_kmh);
    kv!("outdoor_ue_speed_kmh", p.outdoor_speed_kmh);
    kv!("mobility_model", "random_waypoint");
    kv!("traffic_load", "full_buffer");
    kv!("min_ue_distance_m", p.min_ue_distance_m);
    kv!("max_ue_distance_m", spec.max_ue_distance);
    kv!("building_height_m", p.building_height_m);
    kv!("street_width_m", p.street_width_m);
    kv!("standard_glass_loss_db", format!("{} + {} * f_ghz", p.materials.standard_glass.intercept_db, p.materials.standard_glass.slope_db_per_ghz));
    kv!("iirr_glass_loss_db", format!("{} + {} * f_ghz", p.materials.iirr_glass.intercept_db, p.materials.iirr_glass.slope_db_per_ghz));
    kv!("concrete_loss_db", format!("{} + {} * f_ghz", p.materials.concrete.intercept_db, p.materials.concrete.slope_db_per_ghz));
    kv!("shadow_sigma_los_db", p.shadow.los_db);
    kv!("shadow_sigma_los_far_db", p.shadow.los_far_db);
    kv!("shadow_sigma_nlos_db", p.shadow.nlos_db);
    kv!("collecting_sites", p.collecting_sites);
    kv!("background_users_per_cell", spec.background.users_per_cell);
    kv!("background_tx_power_dbm", p.background_tx_power_dbm);
    kv!("hysteresis_db", p.hysteresis_db);
    kv!("time_to_trigger_s", p.time_to_trigger_s);
    kv!("tick_s", p.tick_s);
    o.push('\n');

    o.push_str("[KPIs]\n");
    for k in Kpi::ALL {
        kv!(format!("record_{}", k.name()), yes_no(spec.kpis.contains(&k)));
    }

    for site in &deployment.sites {
        writeln!(o, "\n[Site {}]", site.id).unwrap();
        kv!("x", site.position.x);
        kv!("y", site.position.y);
        kv!("antenna_height_m", site.antenna_height);
        kv!("num_sectors", deployment.cells.iter().filter(|c| c.site_id == site.id).count());
        kv!("num_x2_ports", plan.port_map.get(site.id as usize).map_or(0, Vec::len));
    }
    for cell in &deployment.cells {
        writeln!(o, "\n[Cell {}]", cell.id).unwrap();
        kv!("site", cell.site_id);
        kv!("azimuth_deg", cell.azimuth);
        kv!("tx_power_dbm", cell.tx_power);
        kv!("carrier_frequency_ghz", cell.carrier_ghz);
        kv!("bandwidth_mhz", cell.bandwidth_mhz);
        kv!("hysteresis_db", cell.hysteresis_db);
        kv!("time_to_trigger_s", cell.time_to_trigger_s);
    }
    for (site, ports) in plan.port_map.iter().enumerate() {
        if ports.is_empty() {
            continue;
        }
        writeln!(o, "\n[X2 Site {site}]").unwrap();
        for (port, peer) in ports {
            kv!(format!("x2_port_{port}"), format!("site {peer}"));
        }
    }
    if !plan.links.is_empty() {
        o.push_str("\n[X2 Links]\n");
        for (i, (a, b)) in plan.links.iter().enumerate() {
            let port_of = |s: u32, peer: u32| plan.port_map[s as usize].iter().find(|(_, q)| *q == peer).map(|(p, _)| *p).unwrap_or(0);
            kv!(format!("link_{i}"), format!("site {a} port {} <-> site {b} port {}", port_of(*a, *b), port_of(*b, *a)));
        }
    }
    for ue in &deployment.ues {
        writeln!(o, "\n[UE {}]", ue.id).unwrap();
        kv!("home_site", ue.home_site);
        kv!("initial_x", ue.position.x);
        kv!("initial_y", ue.position.y);
        kv!("height_m", ue.height);
        kv!("indoor", yes_no(ue.indoor));
        kv!("penetration_loss", if ue.indoor { format!("{:?}", ue.penetration_class).to_lowercase() } else { "none".into() });
        kv!("speed_kmh", ue.speed_kmh);
    }
    for bg in &deployment.background {
        writeln!(o, "\n[Background Cell {}]", bg.id).unwrap();
        kv!("x", bg.position.x);
        kv!("y", bg.position.y);
        kv!("tx_power_dbm", bg.tx_power);
        kv!("num_users", bg.users.len());
        for (k, u) in bg.users.iter().enumerate() {
            writeln!(o, "\n[Background UE {}.{}]", bg.id, k).unwrap();
            kv!("x", u.x);
            kv!("y", u.y);
        }
    }
    for (i, f) in spec.faults.iter().enumerate() {
        writeln!(o, "\n[Fault {i}]").unwrap();
        kv!("type", f.kind().name());
        kv!("cell", f.target_cell);
        kv!("start_s", f.start_s);
        kv!("end_s", f.end_s);
        match f.effect {
            FaultEffect::PowerReduction { drop_db } => kv!("power_drop_db", drop_db),
            FaultEffect::LateHandover { hysteresis_db, ttt_s } => {
                kv!("hysteresis_db", hysteresis_db);
                kv!("time_to_trigger_s", ttt_s);
            }
            FaultEffect::Interference { power_dbm } => kv!("interference_power_dbm", power_dbm),
        }
    }
    o
}

/// Writes the emitted configuration to `path`.
pub fn write_config(path: &std::path::Path, text: &str) -> Result<(), CompileError> {
    std::fs::write(path, text)?;
    Ok(())
}
