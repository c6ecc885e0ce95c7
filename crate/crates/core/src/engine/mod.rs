//! Simulation engine: snapshot Monte Carlo drops for calibration and a
//! time-stepped mode with mobility, A3 handover and fault injection.
//!
//! Every cell transmits at full power on the whole carrier at all times
//! (full buffer), so downlink interference is the sum of all non-serving
//! received powers plus background cells. No scheduler is modeled.

pub mod fault;
pub mod handover;
pub mod mobility;
pub mod snapshot;
pub mod timeline;

use thiserror::Error;

use crate::channel::{ChannelError, ChannelModel, Indoor, LinkDraw, LinkGeometry};
use crate::geometry::Point;
use crate::kpi::{self, LinkBudget, NoiseModel};
use crate::params::RadioParams;
use crate::seeding::{self, tag};
use crate::topology::{Deployment, Ue};

pub use fault::{FaultEffect, FaultKind, FaultLabel, FaultSpec};
pub use handover::{evaluate_a3, A3Timer, HandoverEvent, HandoverTrigger};
pub use mobility::Mobility;
pub use snapshot::{run_snapshot, SnapshotOutput};
pub use timeline::{run_timeline, SimState, TimelineOutput};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Receives KPI samples as they are produced.
pub trait KpiSink {
    fn record(&mut self, sample: &kpi::KpiSample);
}

impl KpiSink for Vec<kpi::KpiSample> {
    fn record(&mut self, sample: &kpi::KpiSample) {
        self.push(*sample);
    }
}

/// Per-UE received powers from every cell and background cell, in dBm.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Measurement {
    pub cell_rx: Vec<f64>,
    pub background_rx: Vec<f64>,
}

impl Measurement {
    /// Strongest cell; lowest id wins ties.
    pub fn best_cell(&self) -> u32 {
        let mut best = 0;
        for (i, rx) in self.cell_rx.iter().enumerate() {
            if *rx > self.cell_rx[best] {
                best = i;
            }
        }
        best as u32
    }

    /// Strongest cell other than `serving`.
    pub fn best_neighbor(&self, serving: u32) -> Option<u32> {
        let mut best: Option<usize> = None;
        for (i, rx) in self.cell_rx.iter().enumerate() {
            if i as u32 != serving && best.is_none_or(|b| *rx > self.cell_rx[b]) {
                best = Some(i);
            }
        }
        best.map(|b| b as u32)
    }
}

/// Serving-cell KPIs of one UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KpiValues {
    pub rsrp: f64,
    pub rsrq: f64,
    pub sinr: f64,
    pub coupling_gain: f64,
    pub serving_distance: f64,
}

/// Turns geometry and persisted link draws into received powers and KPIs.
#[derive(Debug, Clone)]
pub struct RadioModel {
    pub channel: ChannelModel,
    pub noise: NoiseModel,
    pub subcarriers: usize,
    pub resource_blocks: usize,
    pub ue_gain_dbi: f64,
    pub background_height_m: f64,
}

impl RadioModel {
    pub fn from_params(params: &RadioParams) -> Self {
        Self {
            channel: ChannelModel::from_params(params),
            noise: NoiseModel::from_params(params),
            subcarriers: params.subcarriers(),
            resource_blocks: params.resource_blocks,
            ue_gain_dbi: params.ue_antenna_gain_dbi,
            background_height_m: params.bs_height_m,
        }
    }

    /// Draws for every site link followed by every background link.
    pub fn link_draws(deployment: &Deployment, seed: u64, stream: u64, ue_id: u32) -> Vec<LinkDraw> {
        let links = deployment.sites.len() + deployment.background.len();
        (0..links as u64).map(|l| LinkDraw::for_link(seed, &[tag::LINK, stream, ue_id as u64, l])).collect()
    }

    pub fn measure(
        &self,
        deployment: &Deployment,
        tx_power: &[f64],
        ue: &Ue,
        position: Point,
        draws: &[LinkDraw],
        out: &mut Measurement,
    ) -> Result<(), ChannelError> {
        let indoor = ue.indoor.then_some(Indoor { class: ue.penetration_class });
        let downtilt = self.channel.antenna.downtilt_deg;
        out.cell_rx.clear();
        out.cell_rx.resize(deployment.cells.len(), f64::NEG_INFINITY);
        let mut cell = 0usize;
        for (site, draw) in deployment.sites.iter().zip(draws) {
            let d2d = site.position.distance(&position);
            let bearing = site.position.bearing_to(&position);
            // one large-scale realization per site, shared by its sectors
            let base = LinkGeometry::new(d2d, site.antenna_height, ue.height, bearing, 0.0, downtilt);
            let real = self.channel.realize(&base, indoor, draw)?;
            while cell < deployment.cells.len() && deployment.cells[cell].site_id == site.id {
                let c = &deployment.cells[cell];
                let geom = LinkGeometry::new(d2d, site.antenna_height, ue.height, bearing, c.azimuth, downtilt);
                let budget = LinkBudget {
                    tx_power: tx_power[cell],
                    path_loss: real.path_loss,
                    penetration: real.penetration,
                    shadow: real.shadow_fading,
                    tx_antenna_gain: self.channel.tx_gain(&geom),
                    rx_antenna_gain: self.ue_gain_dbi,
                };
                out.cell_rx[cell] = budget.rx_power();
                cell += 1;
            }
        }
        out.background_rx.clear();
        let bg_draws = &draws[deployment.sites.len()..];
        for (bg, draw) in deployment.background.iter().zip(bg_draws) {
            let geom = LinkGeometry::new(
                bg.position.distance(&position),
                self.background_height_m,
                ue.height,
                0.0,
                0.0,
                0.0,
            );
            let real = self.channel.realize(&geom, indoor, draw)?;
            let budget = LinkBudget {
                tx_power: bg.tx_power,
                path_loss: real.path_loss,
                penetration: real.penetration,
                shadow: real.shadow_fading,
                tx_antenna_gain: 0.0,
                rx_antenna_gain: self.ue_gain_dbi,
            };
            out.background_rx.push(budget.rx_power());
        }
        Ok(())
    }

    /// KPIs for `serving`, with an optional extra interferer in dBm.
    pub fn kpis(
        &self,
        deployment: &Deployment,
        meas: &Measurement,
        serving: u32,
        serving_tx_power: f64,
        position: Point,
        extra_interference: Option<f64>,
    ) -> KpiValues {
        let s = serving as usize;
        let rx = meas.cell_rx[s];
        let interferers: Vec<f64> = meas
            .cell_rx
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != s)
            .map(|(_, v)| *v)
            .chain(meas.background_rx.iter().copied())
            .chain(extra_interference)
            .collect();
        let sinr = kpi::wideband_sinr(rx, &interferers, &self.noise);
        let rssi = kpi::sum_db(
            std::iter::once(rx).chain(interferers.iter().copied()).chain(std::iter::once(self.noise.total_dbm())),
        );
        let rsrp = kpi::rsrp(rx, self.subcarriers);
        let site = &deployment.sites[deployment.cells[s].site_id as usize];
        KpiValues {
            rsrp,
            rsrq: kpi::rsrq(rsrp, rssi, self.resource_blocks),
            sinr,
            coupling_gain: rx - serving_tx_power,
            serving_distance: site.position.distance(&position),
        }
    }
}

/// Mobility RNG for one UE.
pub(crate) fn mobility_rng(seed: u64, ue_id: u32) -> rand_chacha::ChaCha8Rng {
    seeding::rng(seed, &[tag::MOBILITY, ue_id as u64])
}
