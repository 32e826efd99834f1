//! Preprocess once per source, then answer many targets.
//!
//! Preprocessing runs the edge-keyed Dijkstra to exhaustion over the graph
//! without a target. Whenever an edge into `v` is finalized, the part of its
//! leave range not yet claimed at `v` is recorded in `preds(v)`. A query
//! then only has to try every chain from a node into the target and look up
//! which finalized edge may precede that chain's departure.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    build_chain, enumerate_chains, AngularInterval, Curvature, Point2, RegularChain, EPS_ANG,
};
use crate::graph::{build_graph, validate_chain, NodeId};
use crate::occlusion::OcclusionIndex;
use crate::planner::{PathResult, PlanStats, QueueEntry, Search};
use crate::scene::Scene;

const FORMAT: &str = "rcs-index";
const VERSION: u32 = 1;
/// Slack when collecting candidate ranges around a lookup direction.
const LOOKUP_PAD: f64 = 4.0 * EPS_ANG;

/// A finalized edge of the preprocessed graph. Ids follow extraction order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEdge {
    pub head: NodeId,
    pub tail: NodeId,
    pub k: u32,
    pub curvature: Curvature,
    pub from_start: bool,
    pub w: f64,
    pub arr: f64,
    pub dist: f64,
    pub pred: Option<usize>,
}

/// Directions `[lo, hi]` (a non-wrapping piece of `[0, 2π]`) at a node whose
/// cheapest admissible predecessor is `pred_edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredRange {
    pub lo: f64,
    pub hi: f64,
    pub pred_edge: usize,
    pub base_dist: f64,
}

impl PredRange {
    pub fn interval(&self) -> AngularInterval {
        AngularInterval::new(self.lo, self.hi - self.lo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StoredScene {
    obstacles: Vec<Vec<Point2>>,
    source: Point2,
    l: f64,
    alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct IndexFile {
    format: String,
    version: u32,
    fingerprint: String,
    scene: StoredScene,
    source: NodeId,
    nodes: Vec<Point2>,
    edges: Vec<IndexEdge>,
    preds: Vec<Vec<PredRange>>,
    split_edges: usize,
    max_pieces: usize,
}

/// Per-source preprocessed structure answering target queries.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerIndex {
    scene: Scene,
    fingerprint: String,
    source: NodeId,
    nodes: Vec<Point2>,
    edges: Vec<IndexEdge>,
    preds: Vec<Vec<PredRange>>,
    split_edges: usize,
    max_pieces: usize,
}

/// Record the parts of `[lo, hi]` not yet covered in `map`; returns how many
/// pieces were added.
fn insert_uncovered(
    map: &mut BTreeMap<u64, PredRange>,
    lo: f64,
    hi: f64,
    pred_edge: usize,
    base_dist: f64,
) -> usize {
    // non-negative floats order like their bit patterns
    let first = map
        .range(..=lo.to_bits())
        .next_back()
        .map_or(lo.to_bits(), |(&k, _)| k);
    let mut gaps = Vec::new();
    let mut cursor = lo;
    for r in map.range(first..).map(|(_, r)| r) {
        if r.lo > hi {
            break;
        }
        if r.hi < cursor {
            continue;
        }
        if r.lo > cursor {
            gaps.push((cursor, r.lo));
        }
        cursor = cursor.max(r.hi);
        if cursor >= hi {
            break;
        }
    }
    if cursor < hi {
        gaps.push((cursor, hi));
    }
    for &(a, b) in &gaps {
        map.insert(
            a.to_bits(),
            PredRange {
                lo: a,
                hi: b,
                pred_edge,
                base_dist,
            },
        );
    }
    gaps.len()
}

/// Run the exhaustive sweep from the scene's source. Any target in `scene`
/// is ignored.
pub fn preprocess(scene: &Scene, idx: &OcclusionIndex) -> Result<PlannerIndex> {
    preprocess_with_stats(scene, idx).map(|(ix, _)| ix)
}

/// As [`preprocess`], also returning the sweep's queue instrumentation.
pub fn preprocess_with_stats(
    scene: &Scene,
    idx: &OcclusionIndex,
) -> Result<(PlannerIndex, PlanStats)> {
    let scene = scene.with_target(None)?;
    let g = build_graph(&scene, idx)?;
    let s = g.source();
    let mut search = Search::new(&g, s);
    let mut rank = vec![usize::MAX; g.edge_count()];
    let mut edges = Vec::new();
    let mut maps: Vec<BTreeMap<u64, PredRange>> = vec![BTreeMap::new(); g.node_count()];
    let (mut split_edges, mut max_pieces) = (0, 0);

    while let Some(QueueEntry { dist, edge }) = search.pop() {
        let ce = g.edge(edge);
        let id = edges.len();
        rank[edge] = id;
        let chain = g.chain_of(edge);
        edges.push(IndexEdge {
            head: ce.head,
            tail: ce.tail,
            k: chain.k,
            curvature: chain.curvature,
            from_start: ce.from_start,
            w: ce.w,
            arr: ce.arr,
            dist,
            pred: search.pred[edge].map(|p| rank[p]),
        });
        if ce.tail != s {
            let mut pieces = 0;
            for (lo, hi) in g.leave_range(edge).linear_pieces(0.0) {
                pieces += insert_uncovered(&mut maps[ce.tail], lo, hi, id, dist);
            }
            max_pieces = max_pieces.max(pieces);
            if pieces > 1 {
                split_edges += 1;
            }
        }
        search.relax(edge);
    }

    let preds = maps.into_iter().map(|m| m.into_values().collect()).collect();
    let ix = PlannerIndex {
        fingerprint: scene.fingerprint(),
        scene,
        source: s,
        nodes: g.nodes().to_vec(),
        edges,
        preds,
        split_edges,
        max_pieces,
    };
    Ok((ix, search.stats))
}

/// Shortest admissible path from the indexed source to `t`.
pub fn query(ix: &PlannerIndex, t: Point2, occl: &OcclusionIndex) -> Result<PathResult> {
    query_inner(ix, t, occl, None)
}

/// As [`query`], restricted to paths whose final leg points into `theta`.
pub fn query_directional(
    ix: &PlannerIndex,
    t: Point2,
    occl: &OcclusionIndex,
    theta: &AngularInterval,
) -> Result<PathResult> {
    query_inner(ix, t, occl, Some(theta))
}

fn query_inner(
    ix: &PlannerIndex,
    t: Point2,
    occl: &OcclusionIndex,
    theta: Option<&AngularInterval>,
) -> Result<PathResult> {
    if !t.is_finite() || !ix.scene.is_free(t) {
        return Err(Error::TargetInsideObstacle);
    }
    if t == ix.scene.source {
        return Err(Error::InvalidScene("target coincides with source".into()));
    }
    let (alpha, l) = (ix.scene.alpha, ix.scene.l);

    // (length, predecessor rank, chain); predecessor None means straight from s
    let mut best: Option<(f64, Option<usize>, RegularChain)> = None;
    for (v, &p) in ix.nodes.iter().enumerate() {
        for c in enumerate_chains(p, t, alpha, l) {
            if theta.is_some_and(|th| !th.contains(c.arrival_angle(true))) {
                continue;
            }
            let candidate = if v == ix.source {
                Some((c.total_length, None))
            } else {
                ix.lookup(v, c.departure_angle(true))
                    .map(|r| (ix.edges[r].dist + c.total_length, Some(r)))
            };
            let Some((d, pred)) = candidate else { continue };
            let better = best.as_ref().is_none_or(|(bd, bp, _)| {
                d < *bd || (d == *bd && pred.unwrap_or(0) < bp.unwrap_or(0))
            });
            if better && validate_chain(&c, occl) {
                best = Some((d, pred, c));
            }
        }
    }
    let (d, pred, last) = best.ok_or(Error::NoPath)?;

    let mut seq = Vec::new();
    let mut cur = pred;
    while let Some(e) = cur {
        seq.push(e);
        cur = ix.edges[e].pred;
    }
    seq.reverse();
    let mut pieces: Vec<Vec<Point2>> = seq.iter().map(|&e| ix.edge_polyline(e)).collect();
    pieces.push(last.vertices);
    Ok(PathResult::from_pieces(pieces.iter().map(Vec::as_slice), d, seq))
}

impl PlannerIndex {
    /// Extraction rank of the cheapest finalized edge into `v` whose leave
    /// range admits departure direction `dir`.
    pub fn lookup(&self, v: NodeId, dir: f64) -> Option<usize> {
        let list = &self.preds[v];
        let mut best: Option<usize> = None;
        let mut probe = |x: f64| {
            let end = list.partition_point(|r| r.lo <= x + LOOKUP_PAD);
            for r in list[..end].iter().rev() {
                if r.hi < x - LOOKUP_PAD {
                    break;
                }
                let edge = &self.edges[r.pred_edge];
                let range = AngularInterval::centered(edge.arr, self.scene.alpha);
                if range.contains(dir) && best.is_none_or(|b| r.pred_edge < b) {
                    best = Some(r.pred_edge);
                }
            }
        };
        probe(dir);
        if dir < LOOKUP_PAD {
            probe(dir + TAU);
        }
        if dir > TAU - LOOKUP_PAD {
            probe(dir - TAU);
        }
        best
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn edges(&self) -> &[IndexEdge] {
        &self.edges
    }

    pub fn preds(&self, v: NodeId) -> &[PredRange] {
        &self.preds[v]
    }

    /// Number of finalized edges whose unclaimed leave range was split into
    /// more than one piece.
    pub fn split_edges(&self) -> usize {
        self.split_edges
    }

    /// Largest number of pieces any single edge contributed.
    pub fn max_pieces(&self) -> usize {
        self.max_pieces
    }

    /// Chain vertices of a finalized edge in travel order.
    pub fn edge_polyline(&self, e: usize) -> Vec<Point2> {
        let edge = &self.edges[e];
        let (a, b) = if edge.from_start {
            (edge.head, edge.tail)
        } else {
            (edge.tail, edge.head)
        };
        let chain = build_chain(
            self.nodes[a],
            self.nodes[b],
            edge.k,
            self.scene.alpha,
            edge.curvature,
        )
        .expect("indexed chains were feasible when built");
        chain.traversal(edge.from_start)
    }

    /// Fail unless `scene` (target aside) is the one this index was built for.
    pub fn check_scene(&self, scene: &Scene) -> Result<()> {
        let fp = scene.fingerprint();
        if fp == self.fingerprint {
            Ok(())
        } else {
            Err(Error::IndexMismatch(format!(
                "index built for scene {}, given scene {}",
                &self.fingerprint[..12],
                &fp[..12]
            )))
        }
    }

    pub fn to_json(&self) -> String {
        let file = IndexFile {
            format: FORMAT.into(),
            version: VERSION,
            fingerprint: self.fingerprint.clone(),
            scene: StoredScene {
                obstacles: self.scene.obstacles.clone(),
                source: self.scene.source,
                l: self.scene.l,
                alpha: self.scene.alpha,
            },
            source: self.source,
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            preds: self.preds.clone(),
            split_edges: self.split_edges,
            max_pieces: self.max_pieces,
        };
        serde_json::to_string(&file).expect("index serialization cannot fail")
    }

    /// Parse and validate a stored index. Any defect is reported as
    /// [`Error::IndexMismatch`].
    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::IndexMismatch(msg);
        let file: IndexFile =
            serde_json::from_str(text).map_err(|e| bad(format!("unreadable index: {e}")))?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(bad(format!(
                "unsupported index format {} v{}",
                file.format, file.version
            )));
        }
        let st = file.scene;
        let scene = Scene::new(st.obstacles, st.source, None, st.l, st.alpha)
            .map_err(|e| bad(format!("stored scene is invalid: {e}")))?;
        if scene.fingerprint() != file.fingerprint {
            return Err(bad("stored scene does not match its fingerprint".into()));
        }
        let n = file.nodes.len();
        let m = file.edges.len();
        let consistent = file.source < n
            && file.nodes.len() == scene.vertex_count() + 1
            && file.preds.len() == n
            && file.edges.iter().enumerate().all(|(i, e)| {
                e.head < n && e.tail < n && e.w > 0.0 && e.pred.is_none_or(|p| p < i)
            })
            && file
                .preds
                .iter()
                .flatten()
                .all(|r| r.pred_edge < m && r.lo <= r.hi);
        if !consistent {
            return Err(bad("index structure is inconsistent".into()));
        }
        Ok(Self {
            scene,
            fingerprint: file.fingerprint,
            source: file.source,
            nodes: file.nodes,
            edges: file.edges,
            preds: file.preds,
            split_edges: file.split_edges,
            max_pieces: file.max_pieces,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read(path)?;
        let text = String::from_utf8(text)
            .map_err(|_| Error::IndexMismatch("index is not valid UTF-8".into()))?;
        Self::from_json(&text)
    }
}
