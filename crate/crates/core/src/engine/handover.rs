//! A3 event evaluation.

use serde::{Deserialize, Serialize};

/// Slack for accumulated floating-point tick sums.
const TIMER_EPS: f64 = 1e-9;

/// Advances an A3 timer by one measurement period. The condition is
/// `neighbor - serving > hysteresis`; the timer accumulates `dt` while it
/// holds and resets otherwise. Returns the new timer and whether it has
/// reached the time-to-trigger.
pub fn evaluate_a3(serving_rsrp: f64, neighbor_rsrp: f64, hysteresis: f64, timer: f64, ttt: f64, dt: f64) -> (f64, bool) {
    debug_assert!(dt > 0.0);
    if neighbor_rsrp - serving_rsrp > hysteresis {
        let t = timer + dt;
        (t, t + TIMER_EPS >= ttt)
    } else {
        (0.0, false)
    }
}

/// Per-UE A3 state: the neighbor currently being timed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct A3Timer {
    pub candidate: Option<u32>,
    pub elapsed: f64,
}

impl A3Timer {
    /// Feeds one measurement of the best neighbor. A change of best
    /// neighbor restarts the timer. Returns the target cell on trigger.
    pub fn update(&mut self, serving_rsrp: f64, neighbor: u32, neighbor_rsrp: f64, hysteresis: f64, ttt: f64, dt: f64) -> Option<u32> {
        if self.candidate != Some(neighbor) {
            self.candidate = Some(neighbor);
            self.elapsed = 0.0;
        }
        let (elapsed, trigger) = evaluate_a3(serving_rsrp, neighbor_rsrp, hysteresis, self.elapsed, ttt, dt);
        self.elapsed = elapsed;
        if trigger {
            self.reset();
            Some(neighbor)
        } else {
            None
        }
    }

    pub fn reset(&mut self) {
        *self = A3Timer::default();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HandoverTrigger {
    A3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandoverEvent {
    pub time: f64,
    pub ue_id: u32,
    pub from_cell: u32,
    pub to_cell: u32,
    pub trigger: HandoverTrigger,
    /// False when the sites had no X2 link and the handover was refused.
    pub executed: bool,
}
