//! Planar geometry helpers shared by the topology and engine modules.

use serde::{Deserialize, Serialize};

/// A point (or displacement) in the horizontal plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Bearing from `self` towards `other`, degrees counter-clockwise from +x in [0, 360).
    pub fn bearing_to(&self, other: &Point) -> f64 {
        let deg = (other.y - self.y).atan2(other.x - self.x).to_degrees();
        wrap_360(deg)
    }

    pub fn offset(&self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

/// Axis-aligned rectangle, `min` inclusive, `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            min: Point::new(x0.min(x1), y0.min(y1)),
            max: Point::new(x0.max(x1), y0.max(y1)),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Smallest rectangle containing every point, grown by `margin` on all sides.
    pub fn bounding(points: impl IntoIterator<Item = Point>, margin: f64) -> Option<Rect> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first, first);
        for p in it {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        Some(Rect::new(lo.x - margin, lo.y - margin, hi.x + margin, hi.y + margin))
    }
}

pub fn wrap_360(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    // rem_euclid can return exactly 360.0 for tiny negative inputs
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Wraps an angle difference into [-180, 180).
pub fn wrap_180(deg: f64) -> f64 {
    (deg + 180.0).rem_euclid(360.0) - 180.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bearings_follow_math_convention() {
        let o = Point::ORIGIN;
        assert_eq!(o.bearing_to(&Point::new(1.0, 0.0)), 0.0);
        assert!((o.bearing_to(&Point::new(0.0, 1.0)) - 90.0).abs() < 1e-12);
        assert!((o.bearing_to(&Point::new(0.0, -1.0)) - 270.0).abs() < 1e-12);
    }

    #[test]
    fn angle_wrapping() {
        assert_eq!(wrap_360(-30.0), 330.0);
        assert_eq!(wrap_360(720.0), 0.0);
        assert_eq!(wrap_180(190.0), -170.0);
        assert_eq!(wrap_180(-190.0), 170.0);
        assert_eq!(wrap_180(180.0), -180.0);
    }

    #[test]
    fn bounding_rect_with_margin() {
        let r = Rect::bounding([Point::new(0.0, 1.0), Point::new(2.0, -1.0)], 1.0).unwrap();
        assert_eq!(r, Rect::new(-1.0, -2.0, 3.0, 2.0));
        assert!(Rect::bounding(std::iter::empty(), 1.0).is_none());
    }
}
