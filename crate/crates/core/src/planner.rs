//! Edge-keyed Dijkstra over the chain multigraph, its directional-arrival
//! variant, and an independent path verifier.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geometry::{signed_angle_diff, AngularInterval, Point2};
use crate::graph::{EdgeId, NodeId, PlannerGraph};
use crate::occlusion::{LinearScan, Occluder};
use crate::scene::{point_in_polygon, Scene};

/// A planned route.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    /// Turning points from source to target, junction duplicates removed.
    pub polyline: Vec<Point2>,
    /// Path length `d`.
    pub length: f64,
    /// Direction of the final leg.
    pub arrival_angle: f64,
    /// Graph edges traversed, in order.
    pub edge_sequence: Vec<EdgeId>,
}

impl PathResult {
    /// Concatenate traversed polylines, merging repeated junction points.
    pub fn from_pieces<'a>(
        pieces: impl IntoIterator<Item = &'a [Point2]>,
        length: f64,
        edge_sequence: Vec<EdgeId>,
    ) -> Self {
        let mut polyline: Vec<Point2> = Vec::new();
        for piece in pieces {
            for &p in piece {
                if polyline.last() != Some(&p) {
                    polyline.push(p);
                }
            }
        }
        let arrival_angle = match polyline.as_slice() {
            [.., a, b] => a.angle_to(*b),
            _ => 0.0,
        };
        Self {
            polyline,
            length,
            arrival_angle,
            edge_sequence,
        }
    }

    pub fn turning_points(&self) -> usize {
        self.polyline.len().saturating_sub(2)
    }
}

/// Instrumentation collected during one planning run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanStats {
    pub extractions: usize,
    pub insertions: usize,
    /// Highest number of queue insertions seen for a single edge.
    pub max_insertions_per_edge: u32,
    /// Whether extracted keys never decreased.
    pub monotone: bool,
    /// Arrivals at the target rejected for a bad direction.
    pub discarded_arrivals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct QueueEntry {
    pub dist: f64,
    pub edge: EdgeId,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    // reversed so BinaryHeap pops the smallest (dist, edge)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.edge.cmp(&self.edge))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Per-run Dijkstra state: distances, predecessors and the live
/// `edges_out` structures. Every run starts from a fresh state, so the
/// graph itself is never mutated.
pub(crate) struct Search<'g> {
    pub graph: &'g PlannerGraph,
    pub out: crate::graph::EdgesOut<'g>,
    pub dist: Vec<f64>,
    pub pred: Vec<Option<EdgeId>>,
    inserts: Vec<u32>,
    queue: BinaryHeap<QueueEntry>,
    last: f64,
    pub stats: PlanStats,
}

impl<'g> Search<'g> {
    pub fn new(graph: &'g PlannerGraph, s: NodeId) -> Self {
        let m = graph.edge_count();
        let mut search = Self {
            graph,
            out: graph.edges_out(),
            dist: vec![f64::INFINITY; m],
            pred: vec![None; m],
            inserts: vec![0; m],
            queue: BinaryHeap::new(),
            last: f64::NEG_INFINITY,
            stats: PlanStats {
                monotone: true,
                ..PlanStats::default()
            },
        };
        for e in search.out.present(s) {
            search.out.remove(e);
            search.push(e, graph.edge(e).w, None);
        }
        search
    }

    fn push(&mut self, e: EdgeId, dist: f64, pred: Option<EdgeId>) {
        self.dist[e] = dist;
        self.pred[e] = pred;
        self.inserts[e] += 1;
        self.stats.insertions += 1;
        self.stats.max_insertions_per_edge = self.stats.max_insertions_per_edge.max(self.inserts[e]);
        self.queue.push(QueueEntry { dist, edge: e });
    }

    /// Pop the cheapest queued edge.
    pub fn pop(&mut self) -> Option<QueueEntry> {
        let entry = self.queue.pop()?;
        self.stats.extractions += 1;
        if entry.dist < self.last {
            self.stats.monotone = false;
        }
        self.last = entry.dist;
        Some(entry)
    }

    /// Claim every still-present valid successor of `e`.
    pub fn relax(&mut self, e: EdgeId) {
        let base = self.dist[e];
        for next in self.out.vs(e) {
            self.out.remove(next);
            let w = self.graph.edge(next).w;
            self.push(next, base + w, Some(e));
        }
    }

    /// Edge ids from the source up to and including `e`.
    pub fn trace(&self, mut e: EdgeId) -> Vec<EdgeId> {
        let mut seq = vec![e];
        while let Some(p) = self.pred[e] {
            seq.push(p);
            e = p;
        }
        seq.reverse();
        seq
    }
}

pub(crate) fn path_from_edges(g: &PlannerGraph, edges: Vec<EdgeId>, length: f64) -> PathResult {
    let pieces: Vec<Vec<Point2>> = edges.iter().map(|&e| g.edge_polyline(e)).collect();
    PathResult::from_pieces(pieces.iter().map(Vec::as_slice), length, edges)
}

/// Shortest path from `s` to `t` whose legs are all at least `l` long and
/// whose turns are all at most `alpha`, built from regular chains.
pub fn plan(g: &PlannerGraph, s: NodeId, t: NodeId) -> Result<PathResult> {
    plan_with_stats(g, s, t, None).0
}

/// As [`plan`], but the final leg must point in a direction inside `theta`.
pub fn plan_directional(
    g: &PlannerGraph,
    s: NodeId,
    t: NodeId,
    theta: &AngularInterval,
) -> Result<PathResult> {
    plan_with_stats(g, s, t, Some(theta)).0
}

/// Planning run that also reports queue instrumentation.
pub fn plan_with_stats(
    g: &PlannerGraph,
    s: NodeId,
    t: NodeId,
    theta: Option<&AngularInterval>,
) -> (Result<PathResult>, PlanStats) {
    let mut search = Search::new(g, s);
    while let Some(QueueEntry { dist, edge }) = search.pop() {
        let ce = g.edge(edge);
        if ce.tail == t {
            if theta.is_none_or(|th| th.contains(ce.arr)) {
                let path = path_from_edges(g, search.trace(edge), dist);
                return (Ok(path), search.stats);
            }
            search.stats.discarded_arrivals += 1;
            continue;
        }
        search.relax(edge);
    }
    (Err(Error::NoPath), search.stats)
}

/// Slack allowed by [`check_path_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute slack on the minimum leg length.
    pub leg: f64,
    /// Slack on the turning angle, radians.
    pub angle: f64,
    /// Relative slack between the reported and measured length.
    pub length: f64,
    /// Distance within which endpoints count as matching.
    pub endpoint: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            leg: 1e-9,
            angle: 1e-9,
            length: 1e-9,
            endpoint: 1e-9,
        }
    }
}

/// A broken path requirement.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewPoints,
    NonFinite { vertex: usize },
    StartMismatch { found: Point2 },
    EndMismatch { found: Point2 },
    LegTooShort { leg: usize, length: f64 },
    MaxTurnExceeded { vertex: usize, angle: f64 },
    Blocked { leg: usize },
    InsideObstacle { leg: usize },
    LengthMismatch { reported: f64, measured: f64 },
}

/// Verify `path` against the scene with default tolerances.
pub fn check_path(scene: &Scene, path: &PathResult) -> Vec<Violation> {
    check_path_with(scene, path, &Tolerances::default())
}

/// Verify every path requirement independently of the planner: endpoints,
/// leg lengths, turning angles, and clearance against a fresh linear scan
/// of the obstacle edges. The end check is skipped when the scene has no
/// target.
pub fn check_path_with(scene: &Scene, path: &PathResult, tol: &Tolerances) -> Vec<Violation> {
    let pts = &path.polyline;
    let mut out = Vec::new();
    if pts.len() < 2 {
        out.push(Violation::TooFewPoints);
        return out;
    }
    if let Some(vertex) = pts.iter().position(|p| !p.is_finite()) {
        out.push(Violation::NonFinite { vertex });
        return out;
    }
    let scale = pts.iter().fold(1.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
    let near = |a: Point2, b: Point2| a.distance(b) <= tol.endpoint * scale;
    if !near(pts[0], scene.source) {
        out.push(Violation::StartMismatch { found: pts[0] });
    }
    if let Some(t) = scene.target {
        let last = pts[pts.len() - 1];
        if !near(last, t) {
            out.push(Violation::EndMismatch { found: last });
        }
    }

    let mut measured = 0.0;
    for (leg, w) in pts.windows(2).enumerate() {
        let length = w[0].distance(w[1]);
        measured += length;
        if length < scene.l - tol.leg {
            out.push(Violation::LegTooShort { leg, length });
        }
    }
    for (i, w) in pts.windows(3).enumerate() {
        if w[0] == w[1] || w[1] == w[2] {
            continue;
        }
        let turn = signed_angle_diff(w[0].angle_to(w[1]), w[1].angle_to(w[2])).abs();
        if turn > scene.alpha + tol.angle {
            out.push(Violation::MaxTurnExceeded { vertex: i + 1, angle: turn });
        }
    }

    let scan = LinearScan::new(scene.segment_set());
    let corners: Vec<Point2> = scene.vertices().collect();
    let anchors = |p: Point2| corners.iter().any(|&c| c.distance(p) <= crate::occlusion::IGNORE_RADIUS);
    for (leg, w) in pts.windows(2).enumerate() {
        if w[0] == w[1] {
            continue;
        }
        let ignore: Vec<Point2> = [w[0], w[1]].into_iter().filter(|&p| anchors(p)).collect();
        if scan.blocked(w[0], w[1], &ignore) {
            out.push(Violation::Blocked { leg });
            continue;
        }
        let mid = w[0].midpoint(w[1]);
        if scene.obstacles.iter().any(|poly| point_in_polygon(poly, mid)) {
            out.push(Violation::InsideObstacle { leg });
        }
    }

    if (measured - path.length).abs() > tol.length * measured.max(path.length).max(1.0) {
        out.push(Violation::LengthMismatch {
            reported: path.length,
            measured,
        });
    }
    out
}
