//! Time-stepped simulation with random-waypoint mobility, A3 handover and
//! fault injection.

use rayon::prelude::*;

use super::fault::{self, FaultEffect, FaultLabel, FaultSpec};
use super::handover::{A3Timer, HandoverEvent, HandoverTrigger};
use super::mobility::{self, Mobility};
use super::{EngineError, KpiSink, KpiValues, Measurement, RadioModel};
use crate::channel::LinkDraw;
use crate::geometry::{Point, Rect};
use crate::kpi::{self, KpiSample};
use crate::scenario::{expand_x2, ScenarioSpec, X2Plan};
use crate::topology::{Deployment, Ue};

/// Effective per-cell configuration at the current instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellState {
    pub tx_power: f64,
    pub hysteresis_db: f64,
    pub time_to_trigger_s: f64,
    /// Extra interference seen by this cell's UEs, dBm.
    pub extra_interference: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct UeState {
    pub ue: Ue,
    pub serving: u32,
    pub a3: A3Timer,
    pub mobility: Mobility,
    rng: rand_chacha::ChaCha8Rng,
    draws: Vec<LinkDraw>,
    meas: Measurement,
    kpis: Option<KpiValues>,
}

/// World state of a timeline run.
#[derive(Debug, Clone)]
pub struct SimState {
    pub clock: f64,
    deployment: Deployment,
    x2: X2Plan,
    radio: RadioModel,
    faults: Vec<FaultSpec>,
    cells: Vec<CellState>,
    ues: Vec<UeState>,
    handovers: Vec<HandoverEvent>,
}

fn snap(t: f64) -> f64 {
    (t * 1e9).round() / 1e9
}

impl SimState {
    /// Attaches every UE of `deployment` to its strongest cell at t = 0.
    /// UEs follow random waypoints inside the sites' bounding box grown by
    /// the maximum UE distance.
    pub fn new(spec: &ScenarioSpec, deployment: Deployment, seed: u64) -> Result<Self, EngineError> {
        let bounds = Rect::bounding(deployment.sites.iter().map(|s| s.position), spec.max_ue_distance)
            .unwrap_or(Rect::new(0.0, 0.0, 0.0, 0.0));
        let radio = RadioModel::from_params(&spec.params);
        let ues = deployment
            .ues
            .iter()
            .map(|ue| {
                let mut rng = super::mobility_rng(seed, ue.id);
                let mobility = Mobility::random_waypoint(bounds, &mut rng);
                UeState {
                    ue: ue.clone(),
                    serving: 0,
                    a3: A3Timer::default(),
                    mobility,
                    rng,
                    draws: RadioModel::link_draws(&deployment, seed, 0, ue.id),
                    meas: Measurement::default(),
                    kpis: None,
                }
            })
            .collect();
        let mut state = Self {
            clock: 0.0,
            x2: expand_x2(spec),
            radio,
            faults: spec.faults.clone(),
            cells: Vec::new(),
            ues,
            handovers: Vec::new(),
            deployment,
        };
        state.refresh_cells();
        state.measure_all()?;
        for u in &mut state.ues {
            u.serving = u.meas.best_cell();
        }
        state.compute_kpis();
        Ok(state)
    }

    pub fn deployment(&self) -> &Deployment {
        &self.deployment
    }

    pub fn ues(&self) -> &[UeState] {
        &self.ues
    }

    pub fn handovers(&self) -> &[HandoverEvent] {
        &self.handovers
    }

    pub fn cell_state(&self, cell: u32) -> &CellState {
        &self.cells[cell as usize]
    }

    pub fn set_mobility(&mut self, ue: usize, mobility: Mobility) {
        self.ues[ue].mobility = mobility;
    }

    /// RSRP of `cell` as measured by UE index `ue`.
    pub fn cell_rsrp(&self, ue: usize, cell: u32) -> f64 {
        kpi::rsrp(self.ues[ue].meas.cell_rx[cell as usize], self.radio.subcarriers)
    }

    pub fn serving_kpis(&self, ue: usize) -> KpiValues {
        self.ues[ue].kpis.expect("kpis are computed on construction and every step")
    }

    /// Adds a fault; it takes effect whenever the clock is inside its window.
    pub fn apply_fault(&mut self, fault: FaultSpec) {
        self.faults.push(fault);
        self.refresh_cells();
        for u in &mut self.ues {
            u.kpis = None;
        }
        self.compute_kpis();
    }

    pub fn active_faults(&self) -> impl Iterator<Item = &FaultSpec> {
        self.faults.iter().filter(move |f| f.is_active(self.clock))
    }

    fn refresh_cells(&mut self) {
        let clock = self.clock;
        self.cells = self
            .deployment
            .cells
            .iter()
            .map(|c| CellState {
                tx_power: c.tx_power,
                hysteresis_db: c.hysteresis_db,
                time_to_trigger_s: c.time_to_trigger_s,
                extra_interference: None,
            })
            .collect();
        for f in self.faults.iter().filter(|f| f.is_active(clock)) {
            let cell = &mut self.cells[f.target_cell as usize];
            match f.effect {
                FaultEffect::PowerReduction { drop_db } => cell.tx_power -= drop_db,
                FaultEffect::LateHandover { hysteresis_db, ttt_s } => {
                    cell.hysteresis_db = hysteresis_db;
                    cell.time_to_trigger_s = ttt_s;
                }
                FaultEffect::Interference { power_dbm } => {
                    cell.extra_interference = Some(match cell.extra_interference {
                        Some(prev) => kpi::sum_db([prev, power_dbm]),
                        None => power_dbm,
                    });
                }
            }
        }
    }

    fn measure_all(&mut self) -> Result<(), EngineError> {
        let tx: Vec<f64> = self.cells.iter().map(|c| c.tx_power).collect();
        let (dep, radio) = (&self.deployment, &self.radio);
        self.ues.par_iter_mut().try_for_each(|u| {
            let pos = u.ue.position;
            radio.measure(dep, &tx, &u.ue, pos, &u.draws, &mut u.meas).map_err(EngineError::from)
        })
    }

    fn compute_kpis(&mut self) {
        let (dep, radio, cells) = (&self.deployment, &self.radio, &self.cells);
        self.ues.par_iter_mut().for_each(|u| {
            let cell = &cells[u.serving as usize];
            u.kpis = Some(radio.kpis(dep, &u.meas, u.serving, cell.tx_power, u.ue.position, cell.extra_interference));
        });
    }

    /// Advances the clock by `dt`: moves UEs, re-measures, runs A3 and
    /// executes handovers allowed by the X2 plan.
    pub fn step(&mut self, dt: f64) -> Result<(), EngineError> {
        if !(dt > 0.0) {
            return Err(EngineError::Config("time step must be positive".into()));
        }
        self.ues.par_iter_mut().for_each(|u| {
            let speed = mobility::kmh_to_ms(u.ue.speed_kmh);
            mobility::advance(&mut u.ue.position, &mut u.mobility, speed, dt, &mut u.rng);
        });
        self.clock = snap(self.clock + dt);
        self.refresh_cells();
        self.measure_all()?;

        let clock = self.clock;
        for u in &mut self.ues {
            let Some(neighbor) = u.meas.best_neighbor(u.serving) else { continue };
            let serving_cell = &self.cells[u.serving as usize];
            let fired = u.a3.update(
                u.meas.cell_rx[u.serving as usize],
                neighbor,
                u.meas.cell_rx[neighbor as usize],
                serving_cell.hysteresis_db,
                serving_cell.time_to_trigger_s,
                dt,
            );
            if let Some(target) = fired {
                let from_site = self.deployment.site_of(u.serving);
                let to_site = self.deployment.site_of(target);
                let executed = self.x2.connected(from_site, to_site);
                self.handovers.push(HandoverEvent {
                    time: clock,
                    ue_id: u.ue.id,
                    from_cell: u.serving,
                    to_cell: target,
                    trigger: HandoverTrigger::A3,
                    executed,
                });
                if executed {
                    u.serving = target;
                }
            }
        }
        self.compute_kpis();
        Ok(())
    }

    /// One sample per UE for the current instant.
    pub fn samples(&self) -> impl Iterator<Item = KpiSample> + '_ {
        self.ues.iter().map(move |u| {
            let k = u.kpis.expect("kpis are computed on construction and every step");
            KpiSample {
                time: self.clock,
                drop: 0,
                ue_id: u.ue.id,
                serving_cell: u.serving,
                serving_site: self.deployment.site_of(u.serving),
                position: u.ue.position,
                serving_distance: k.serving_distance,
                rsrp: k.rsrp,
                rsrq: k.rsrq,
                sinr: k.sinr,
                coupling_gain: k.coupling_gain,
            }
        })
    }

    pub fn position(&self, ue: usize) -> Point {
        self.ues[ue].ue.position
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimelineOutput {
    pub handovers: Vec<HandoverEvent>,
    pub labels: Vec<FaultLabel>,
    pub ticks: u64,
    pub deployment: Deployment,
}

/// Runs the scenario for its full simulation time at the configured tick,
/// streaming one sample per UE per tick into `sink`.
pub fn run_timeline<S: KpiSink>(spec: &ScenarioSpec, seed: u64, sink: &mut S) -> Result<TimelineOutput, EngineError> {
    let dt = spec.params.tick_s;
    let ticks = (spec.simulation_time / dt).round() as u64;
    let deployment = Deployment::generate(spec, seed, 0);
    let mut state = SimState::new(spec, deployment, seed)?;
    for k in 0..ticks {
        if k > 0 {
            state.step(dt)?;
        }
        for s in state.samples() {
            sink.record(&s);
        }
    }
    let cell_sites = spec.cell_sites();
    let labels = fault::labels(&spec.faults, |c| cell_sites[c as usize], spec.bins());
    Ok(TimelineOutput { handovers: state.handovers, labels, ticks, deployment: state.deployment })
}
