//! ranforge: a 5G RAN system-level simulator for urban and rural eMBB
//! calibration, scenario compilation, fault injection and labeled KPI
//! dataset generation.
//!
//! The pipeline runs scenario YAML → [`scenario::ScenarioSpec`] →
//! [`topology::Deployment`] → [`engine`] (snapshot drops or a timeline) →
//! [`calibration`] reports or [`dataset`] exports. The `ranforge` binary
//! wraps these steps; see [`cli`].

pub mod calibration;
pub mod channel;
pub mod cli;
pub mod dataset;
pub mod engine;
pub mod geometry;
pub mod kpi;
pub mod manifest;
pub mod params;
pub mod scenario;
pub mod seeding;
pub mod topology;

pub use calibration::{calibration_report, empirical_cdf, ks_statistic, CdfCurve, KsResult};
pub use channel::{ChannelModel, ChannelRealization, LinkGeometry, PathLossModel};
pub use engine::{run_snapshot, run_timeline, FaultKind, FaultSpec, SimState};
pub use kpi::{KpiSample, LinkBudget, NoiseModel};
pub use params::{Environment, RadioParams};
pub use scenario::{emit_config, expand_x2, parse_scenario, ScenarioSpec, X2Plan};
pub use topology::Deployment;
