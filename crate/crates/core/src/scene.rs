//! Planning scenes and their on-disk form.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::occlusion::{point_on_segment, segment_blocks, Segment, SegmentSet};

/// Obstacles plus the planning query.
///
/// Obstacles are simple polygons stored counter-clockwise. A two-vertex
/// obstacle is a segment (a rod of zero width).
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub obstacles: Vec<Vec<Point2>>,
    pub source: Point2,
    pub target: Option<Point2>,
    /// Minimum leg length.
    pub l: f64,
    /// Maximum turning angle, radians.
    pub alpha: f64,
}

impl Scene {
    /// Validates and normalizes obstacles to counter-clockwise order.
    pub fn new(
        obstacles: Vec<Vec<Point2>>,
        source: Point2,
        target: Option<Point2>,
        l: f64,
        alpha: f64,
    ) -> Result<Self> {
        let mut scene = Scene {
            obstacles,
            source,
            target,
            l,
            alpha,
        };
        scene.validate()?;
        for poly in &mut scene.obstacles {
            if poly.len() > 2 && signed_area(poly) < 0.0 {
                poly.reverse();
            }
        }
        Ok(scene)
    }

    fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::InvalidScene(format!("l must be positive, got {}", self.l)));
        }
        if !(self.alpha > 0.0 && self.alpha < std::f64::consts::PI) {
            return Err(Error::InvalidScene(format!(
                "alpha must lie in (0, pi), got {}",
                self.alpha
            )));
        }
        let points = self
            .obstacles
            .iter()
            .flatten()
            .chain(std::iter::once(&self.source))
            .chain(self.target.iter());
        if points.into_iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidScene("non-finite coordinate".into()));
        }
        for (i, poly) in self.obstacles.iter().enumerate() {
            if poly.len() < 2 {
                return Err(Error::InvalidScene(format!("obstacle {i} has fewer than 2 vertices")));
            }
            if !is_simple(poly) {
                return Err(Error::InvalidScene(format!("obstacle {i} is not simple")));
            }
        }
        for i in 0..self.obstacles.len() {
            for j in i + 1..self.obstacles.len() {
                if !disjoint(&self.obstacles[i], &self.obstacles[j]) {
                    return Err(Error::InvalidScene(format!("obstacles {i} and {j} intersect")));
                }
            }
        }
        if !self.is_free(self.source) {
            return Err(Error::SourceInsideObstacle);
        }
        if let Some(t) = self.target {
            if !self.is_free(t) {
                return Err(Error::TargetInsideObstacle);
            }
            if t == self.source {
                return Err(Error::InvalidScene("source and target coincide".into()));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.obstacles.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point2> + '_ {
        self.obstacles.iter().flatten().copied()
    }

    pub fn segment_set(&self) -> SegmentSet {
        SegmentSet::from_polygons(self.obstacles.iter().map(Vec::as_slice))
    }

    /// Outside every obstacle and off every obstacle edge.
    pub fn is_free(&self, p: Point2) -> bool {
        self.obstacles.iter().all(|poly| !on_boundary(poly, p) && !point_in_polygon(poly, p))
    }

    pub fn with_target(&self, target: Option<Point2>) -> Result<Scene> {
        let mut s = self.clone();
        s.target = target;
        s.validate()?;
        Ok(s)
    }

    /// Every coordinate and `l` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Scene {
        let f = |p: &Point2| *p * factor;
        Scene {
            obstacles: self.obstacles.iter().map(|poly| poly.iter().map(f).collect()).collect(),
            source: f(&self.source),
            target: self.target.as_ref().map(f),
            l: self.l * factor,
            alpha: self.alpha,
        }
    }

    /// Apply a rigid motion `p -> R(angle) p + offset` to every point.
    pub fn transformed(&self, angle: f64, offset: Point2) -> Scene {
        let f = |p: &Point2| p.rotated(angle) + offset;
        Scene {
            obstacles: self.obstacles.iter().map(|poly| poly.iter().map(f).collect()).collect(),
            source: f(&self.source),
            target: self.target.as_ref().map(f),
            l: self.l,
            alpha: self.alpha,
        }
    }

    /// Axis-aligned bounds of obstacles, source and target.
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut lo = self.source;
        let mut hi = self.source;
        for p in self.vertices().chain(self.target) {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// SHA-256 over the obstacle set, source, `l` and `alpha` (the target is
    /// excluded so preprocessed indexes can be matched against scenes).
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"rcs-scene-v1");
        h.update((self.obstacles.len() as u64).to_le_bytes());
        for poly in &self.obstacles {
            h.update((poly.len() as u64).to_le_bytes());
            for p in poly {
                h.update(p.x.to_le_bytes());
                h.update(p.y.to_le_bytes());
            }
        }
        h.update(self.source.x.to_le_bytes());
        h.update(self.source.y.to_le_bytes());
        h.update(self.l.to_le_bytes());
        h.update(self.alpha.to_le_bytes());
        hex::encode(h.finalize())
    }
}

pub fn signed_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].cross(poly[(i + 1) % n]))
        .sum::<f64>()
        / 2.0
}

fn edges(poly: &[Point2]) -> Vec<Segment> {
    match poly.len() {
        2 => vec![Segment::new(poly[0], poly[1])],
        n => (0..n).map(|i| Segment::new(poly[i], poly[(i + 1) % n])).collect(),
    }
}

fn is_simple(poly: &[Point2]) -> bool {
    let es = edges(poly);
    if es.iter().any(|e| e.a == e.b) {
        return false;
    }
    if poly.len() > 2 && signed_area(poly).abs() == 0.0 {
        return false;
    }
    let n = es.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1 && n > 2);
            let e = &es[j];
            if adjacent {
                // neighbours may only share their common vertex
                let shared = if j == i + 1 { es[i].b } else { es[i].a };
                if segment_blocks(es[i].a, es[i].b, e, &[shared]) {
                    return false;
                }
            } else if segment_blocks(es[i].a, es[i].b, e, &[]) {
                return false;
            }
        }
    }
    true
}

fn disjoint(p: &[Point2], q: &[Point2]) -> bool {
    let ep = edges(p);
    let eq = edges(q);
    if ep
        .iter()
        .any(|a| eq.iter().any(|b| segment_blocks(a.a, a.b, b, &[])))
    {
        return false;
    }
    !point_in_polygon(p, q[0]) && !point_in_polygon(q, p[0])
}

/// Crossing-number test; points on the boundary may go either way.
/// Two-vertex obstacles have no interior.
pub fn point_in_polygon(poly: &[Point2], p: Point2) -> bool {
    if poly.len() < 3 {
        return false;
    }
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn on_boundary(poly: &[Point2], p: Point2) -> bool {
    edges(poly).iter().any(|e| point_on_segment(p, e))
}

/// Serialized scene: obstacles as vertex lists, angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    #[serde(default = "default_units")]
    pub units: String,
    #[serde(default)]
    pub obstacles: Vec<Vec<Point2>>,
    pub source: Point2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Point2>,
    pub l: f64,
    pub alpha_degrees: f64,
}

fn default_units() -> String {
    "scene units".into()
}

impl SceneFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialization cannot fail")
    }

    pub fn into_scene(self) -> Result<Scene> {
        Scene::new(
            self.obstacles,
            self.source,
            self.target,
            self.l,
            self.alpha_degrees.to_radians(),
        )
    }

    pub fn from_scene(scene: &Scene) -> Self {
        SceneFile {
            units: default_units(),
            obstacles: scene.obstacles.clone(),
            source: scene.source,
            target: scene.target,
            l: scene.l,
            alpha_degrees: scene.alpha.to_degrees(),
        }
    }
}
