//! Random waypoint and scripted UE movement.

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point, Rect};

#[derive(Debug, Clone, PartialEq)]
pub enum Mobility {
    /// Move towards `target`; draw a new uniform target inside `bounds`
    /// on arrival. No pause time.
    RandomWaypoint { target: Point, bounds: Rect },
    /// Visit the points in order, then stop.
    Path(VecDeque<Point>),
    Static,
}

impl Mobility {
    pub fn random_waypoint(bounds: Rect, rng: &mut ChaCha8Rng) -> Self {
        Mobility::RandomWaypoint { target: uniform_in(&bounds, rng), bounds }
    }
}

pub fn kmh_to_ms(kmh: f64) -> f64 {
    kmh / 3.6
}

fn uniform_in(bounds: &Rect, rng: &mut ChaCha8Rng) -> Point {
    Point::new(
        bounds.min.x + rng.random::<f64>() * bounds.width(),
        bounds.min.y + rng.random::<f64>() * bounds.height(),
    )
}

/// Moves `position` by `speed_ms * dt` meters along the mobility plan.
pub fn advance(position: &mut Point, mobility: &mut Mobility, speed_ms: f64, dt: f64, rng: &mut ChaCha8Rng) {
    let mut budget = speed_ms * dt;
    // a handful of arrivals per tick at most; the cap guards degenerate boxes
    for _ in 0..64 {
        if budget <= 0.0 {
            return;
        }
        let target = match mobility {
            Mobility::Static => return,
            Mobility::RandomWaypoint { target, .. } => *target,
            Mobility::Path(points) => match points.front() {
                Some(p) => *p,
                None => return,
            },
        };
        let remaining = position.distance(&target);
        if remaining > budget {
            let f = budget / remaining;
            *position = Point::new(position.x + f * (target.x - position.x), position.y + f * (target.y - position.y));
            return;
        }
        *position = target;
        budget -= remaining;
        match mobility {
            Mobility::RandomWaypoint { target, bounds } => *target = uniform_in(bounds, rng),
            Mobility::Path(points) => {
                points.pop_front();
            }
            Mobility::Static => {}
        }
    }
}
