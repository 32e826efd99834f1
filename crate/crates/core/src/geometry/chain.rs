//! Regular chains of segments: polylines whose legs all have the same length
//! and whose turning points all turn by the same angle to the same side, so
//! the chain is a piece of a regular polygon with exterior angle `alpha`.
//!
//! With anchors `A_0 = u` and `A_{k+1} = v`, `k` turning points and signed
//! per-turn angle `a` (`+alpha` for counter-clockwise turns), the chain is
//! fixed by
//!
//! ```text
//! theta = k * a / 2
//! beta  = gamma - (a + theta)          gamma = direction of v - u
//! A_j   = u + e * sum_{i=1..j} (cos(i a + beta), sin(i a + beta))
//! e     = (v - u).x / sum_{i=1..k+1} cos(i a + beta)
//!       = (v - u).y / sum_{i=1..k+1} sin(i a + beta)
//! ```

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{normalize_angle, AngularInterval, Point2};

/// Anchor separation below which no chain is built.
pub const MIN_ANCHOR_SEPARATION: f64 = 1e-12;

/// Denominator magnitude below which the leg length is undefined.
const MIN_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("chain anchors coincide")]
    DegenerateAnchors,
    #[error("turning angle must lie strictly between 0 and pi")]
    InvalidTurnAngle,
    #[error("no regular chain with this many turning points exists")]
    Infeasible,
}

/// Side every turning point of a chain turns to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Curvature {
    /// Counter-clockwise turns (`+1`).
    Ccw,
    /// Clockwise turns (`-1`).
    Cw,
}

impl Curvature {
    pub fn sign(self) -> f64 {
        match self {
            Curvature::Ccw => 1.0,
            Curvature::Cw => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Curvature::Ccw => Curvature::Cw,
            Curvature::Cw => Curvature::Ccw,
        }
    }
}

impl From<Curvature> for i8 {
    fn from(c: Curvature) -> i8 {
        match c {
            Curvature::Ccw => 1,
            Curvature::Cw => -1,
        }
    }
}

impl TryFrom<i8> for Curvature {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Curvature::Ccw),
            -1 => Ok(Curvature::Cw),
            other => Err(format!("curvature must be 1 or -1, got {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularChain {
    pub start: Point2,
    pub end: Point2,
    /// Number of turning points.
    pub k: u32,
    pub curvature: Curvature,
    /// Unsigned per-turn angle.
    pub alpha: f64,
    /// Leg length.
    pub e: f64,
    /// Direction of the imaginary leg entering `start`.
    pub beta: f64,
    /// `k + 2` vertices from `start` to `end`.
    pub vertices: Vec<Point2>,
    pub total_length: f64,
}

impl RegularChain {
    fn signed_alpha(&self) -> f64 {
        self.alpha * self.curvature.sign()
    }

    /// Vertices in traversal order.
    pub fn traversal(&self, from_start: bool) -> Vec<Point2> {
        let mut v = self.vertices.clone();
        if !from_start {
            v.reverse();
        }
        v
    }

    pub fn departure_angle(&self, from_start: bool) -> f64 {
        departure_angle(self, from_start)
    }

    pub fn arrival_angle(&self, from_start: bool) -> f64 {
        arrival_angle(self, from_start)
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Largest admissible number of turning points for `alpha`: the chain must
/// stay a proper part of the regular polygon with exterior angle `alpha`,
/// i.e. `k + 2 <= ceil(2π / alpha)`.
pub fn max_turns(alpha: f64) -> u32 {
    let vertices = (TAU / alpha - 1e-9).ceil();
    (vertices as i64 - 2).max(0) as u32
}

pub fn build_chain(
    u: Point2,
    v: Point2,
    k: u32,
    alpha: f64,
    curvature: Curvature,
) -> Result<RegularChain, ChainError> {
    let chord = v - u;
    if chord.norm() < MIN_ANCHOR_SEPARATION {
        return Err(ChainError::DegenerateAnchors);
    }
    if !(alpha > 0.0 && alpha < PI) {
        return Err(ChainError::InvalidTurnAngle);
    }
    if k > max_turns(alpha) {
        return Err(ChainError::Infeasible);
    }

    let a = alpha * curvature.sign();
    let theta = f64::from(k) * a / 2.0;
    let gamma = chord.y.atan2(chord.x);
    let beta = gamma - (a + theta);

    // Closed forms in the chord frame: the partial sum of the first `j`
    // unit legs has length sin(j·α/2)/sin(α/2) and direction (j-1-k)·a/2
    // relative to the chord.
    let denom = (f64::from(k + 1) * alpha / 2.0).sin();
    if denom < MIN_DENOMINATOR {
        return Err(ChainError::Infeasible);
    }
    let d = chord.norm();
    let e = if k == 0 { d } else { d * (alpha / 2.0).sin() / denom };
    if !(e > 0.0 && e.is_finite()) {
        return Err(ChainError::Infeasible);
    }

    let along = chord * (1.0 / d);
    let across = Point2::new(-along.y, along.x);
    let mut vertices = Vec::with_capacity(k as usize + 2);
    vertices.push(u);
    for j in 1..=k {
        let rho = d * (f64::from(j) * alpha / 2.0).sin() / denom;
        let psi = (f64::from(j) - 1.0 - f64::from(k)) * a / 2.0;
        vertices.push(u + along * (rho * psi.cos()) + across * (rho * psi.sin()));
    }
    vertices.push(v);

    Ok(RegularChain {
        start: u,
        end: v,
        k,
        curvature,
        alpha,
        e,
        beta: normalize_angle(beta),
        vertices,
        total_length: f64::from(k + 1) * e,
    })
}

/// All chains from `u` to `v` whose legs are at least `l` long: the straight
/// segment (when `|uv| >= l`) followed by each curvature branch in
/// increasing `k`. A branch stops at the first `k` that is infeasible or
/// whose leg drops below `l`.
pub fn enumerate_chains(u: Point2, v: Point2, alpha: f64, l: f64) -> Vec<RegularChain> {
    let mut chains = Vec::new();
    match build_chain(u, v, 0, alpha, Curvature::Ccw) {
        Ok(c) if c.e >= l => chains.push(c),
        _ => return chains,
    }
    for curvature in [Curvature::Ccw, Curvature::Cw] {
        for k in 1..=max_turns(alpha) {
            match build_chain(u, v, k, alpha, curvature) {
                Ok(c) if c.e >= l => chains.push(c),
                _ => break,
            }
        }
    }
    chains
}

/// Direction of the first traversed leg, in `[0, 2π)`.
pub fn departure_angle(c: &RegularChain, from_start: bool) -> f64 {
    let a = c.signed_alpha();
    if from_start {
        normalize_angle(a + c.beta)
    } else {
        normalize_angle(f64::from(c.k + 1) * a + c.beta + PI)
    }
}

/// Direction of the last traversed leg, in `[0, 2π)`.
pub fn arrival_angle(c: &RegularChain, from_start: bool) -> f64 {
    let a = c.signed_alpha();
    if from_start {
        normalize_angle(f64::from(c.k + 1) * a + c.beta)
    } else {
        normalize_angle(a + c.beta + PI)
    }
}

/// Valid leave range: departures reachable from the arrival direction by
/// turning at most `alpha` either way.
pub fn vlr(c: &RegularChain, from_start: bool, alpha: f64) -> AngularInterval {
    AngularInterval::centered(arrival_angle(c, from_start), alpha)
}
