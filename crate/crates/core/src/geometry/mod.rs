//! Planar primitives: points, normalized angles and wraparound-aware
//! angular intervals, plus the regular-chain constructions in [`chain`].

pub mod chain;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

pub use chain::{
    arrival_angle, build_chain, departure_angle, enumerate_chains, max_turns, vlr, ChainError,
    Curvature, RegularChain,
};

/// Angular comparison tolerance in radians.
pub const EPS_ANG: f64 = 1e-9;

/// A point (or vector) in scene units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing in direction `angle`.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, s)
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        (other - self).norm()
    }

    /// Direction of `other - self` in `[0, 2π)`.
    pub fn angle_to(self, other: Self) -> f64 {
        let d = other - self;
        normalize_angle(d.y.atan2(d.x))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotate about the origin by `angle` radians.
    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn midpoint(self, other: Self) -> Self {
        Self::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Map any finite angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed difference `to - from` wrapped into `(-π, π]`.
pub fn signed_angle_diff(from: f64, to: f64) -> f64 {
    let d = normalize_angle(to - from);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Closed arc of directions `[start, start + width]`, measured
/// counter-clockwise and allowed to cross the zero direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularInterval {
    start: f64,
    width: f64,
}

impl AngularInterval {
    /// Arc starting at `start` (any finite angle) spanning `width` radians,
    /// clamped to `[0, 2π]`.
    pub fn new(start: f64, width: f64) -> Self {
        Self {
            start: normalize_angle(start),
            width: width.clamp(0.0, TAU),
        }
    }

    pub fn full() -> Self {
        Self::new(0.0, TAU)
    }

    /// Arc `[center - half_width, center + half_width]`.
    pub fn centered(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, 2.0 * half_width)
    }

    /// Counter-clockwise arc from `from` to `to`.
    pub fn between(from: f64, to: f64) -> Self {
        Self::new(from, normalize_angle(to - from))
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn end(&self) -> f64 {
        normalize_angle(self.start + self.width)
    }

    pub fn is_full(&self) -> bool {
        self.width >= TAU - EPS_ANG
    }

    /// Membership with [`EPS_ANG`] slack on both ends.
    pub fn contains(&self, angle: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let d = normalize_angle(angle - self.start);
        d <= self.width + EPS_ANG || d >= TAU - EPS_ANG
    }

    /// The arc as at most two non-wrapping pieces `[lo, hi]` inside
    /// `[0, 2π]`, each widened by `pad` on both ends.
    pub fn linear_pieces(&self, pad: f64) -> Vec<(f64, f64)> {
        if self.width + 2.0 * pad >= TAU {
            return vec![(0.0, TAU)];
        }
        let lo = self.start - pad;
        let hi = self.start + self.width + pad;
        if lo < 0.0 {
            vec![(0.0, hi), (lo + TAU, TAU)]
        } else if hi > TAU {
            vec![(0.0, hi - TAU), (lo, TAU)]
        } else {
            vec![(lo, hi)]
        }
    }
}

impl fmt::Display for AngularInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.4}°, +{:.4}°]",
            self.start.to_degrees(),
            self.width.to_degrees()
        )
    }
}
