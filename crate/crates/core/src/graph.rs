//! The chain multigraph: nodes are obstacle vertices plus source and target,
//! and every collision-free regular chain between two nodes contributes one
//! directed edge per traversal direction.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    enumerate_chains, vlr, AngularInterval, Point2, RegularChain, EPS_ANG,
};
use crate::occlusion::{OcclusionIndex, Occluder};
use crate::scene::Scene;

/// Below this many nodes chain validation runs on the calling thread.
const PARALLEL_MIN_NODES: usize = 32;

pub type NodeId = usize;
pub type EdgeId = usize;

/// One traversal direction of a valid chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainEdge {
    pub id: EdgeId,
    pub head: NodeId,
    pub tail: NodeId,
    /// Index into [`PlannerGraph::chains`].
    pub chain: usize,
    /// Whether the edge walks the chain from its `start` to its `end`.
    pub from_start: bool,
    pub w: f64,
    /// Departure direction at `head`.
    pub dep: f64,
    /// Arrival direction at `tail`.
    pub arr: f64,
}

#[derive(Debug, Clone)]
pub struct PlannerGraph {
    nodes: Vec<Point2>,
    obstacle_vertices: usize,
    source: NodeId,
    target: Option<NodeId>,
    alpha: f64,
    l: f64,
    chains: Vec<RegularChain>,
    edges: Vec<ChainEdge>,
    /// Outgoing edges of node `v` live in `out_order[out_offsets[v]..out_offsets[v + 1]]`,
    /// sorted counter-clockwise by `(dep, w, id)`.
    out_offsets: Vec<usize>,
    out_order: Vec<EdgeId>,
    out_pos: Vec<usize>,
}

/// True when every leg of `c` is unblocked, touching obstacles at most at
/// its own anchors, and the chain does not leave its start anchor into the
/// obstacle that vertex belongs to.
///
/// A chain that only touches obstacle boundaries at its two anchors lies in
/// a single face of the obstacle arrangement, so checking the first leg's
/// direction at the start anchor settles whether that face is free space.
pub fn validate_chain(c: &RegularChain, idx: &OcclusionIndex) -> bool {
    let last = c.vertices.len() - 2;
    let blocked = c.segments().enumerate().any(|(i, (p, q))| {
        let ignore: &[Point2] = match (i == 0, i == last) {
            (true, true) => &[c.start, c.end],
            (true, false) => &[c.start],
            (false, true) => &[c.end],
            (false, false) => &[],
        };
        idx.blocked(p, q, ignore)
    });
    !blocked && !idx.enters_obstacle(c.start, c.vertices[1] - c.start)
}

pub fn build_graph(scene: &Scene, idx: &OcclusionIndex) -> Result<PlannerGraph> {
    if !scene.is_free(scene.source) {
        return Err(Error::SourceInsideObstacle);
    }
    if let Some(t) = scene.target {
        if !scene.is_free(t) {
            return Err(Error::TargetInsideObstacle);
        }
    }

    let mut nodes: Vec<Point2> = scene.vertices().collect();
    let obstacle_vertices = nodes.len();
    let source = nodes.len();
    nodes.push(scene.source);
    let target = scene.target.map(|t| {
        nodes.push(t);
        nodes.len() - 1
    });

    let (alpha, l) = (scene.alpha, scene.l);
    let chains_from = |u: NodeId| {
        let mut found = Vec::new();
        for v in u + 1..nodes.len() {
            for c in enumerate_chains(nodes[u], nodes[v], alpha, l) {
                if validate_chain(&c, idx) {
                    found.push((u, v, c));
                }
            }
        }
        found
    };
    let per_node: Vec<Vec<(NodeId, NodeId, RegularChain)>> = if nodes.len() < PARALLEL_MIN_NODES {
        (0..nodes.len()).map(chains_from).collect()
    } else {
        (0..nodes.len()).into_par_iter().map(chains_from).collect()
    };

    let mut chains = Vec::new();
    let mut edges = Vec::new();
    for (u, v, c) in per_node.into_iter().flatten() {
        let chain = chains.len();
        for (head, tail, from_start) in [(u, v, true), (v, u, false)] {
            edges.push(ChainEdge {
                id: edges.len(),
                head,
                tail,
                chain,
                from_start,
                w: c.total_length,
                dep: c.departure_angle(from_start),
                arr: c.arrival_angle(from_start),
            });
        }
        chains.push(c);
    }

    let mut out_order: Vec<EdgeId> = (0..edges.len()).collect();
    out_order.sort_by(|&a, &b| {
        let (ea, eb) = (&edges[a], &edges[b]);
        ea.head
            .cmp(&eb.head)
            .then(ea.dep.total_cmp(&eb.dep))
            .then(ea.w.total_cmp(&eb.w))
            .then(ea.id.cmp(&eb.id))
    });
    let mut out_offsets = vec![0; nodes.len() + 1];
    for e in &edges {
        out_offsets[e.head + 1] += 1;
    }
    for i in 0..nodes.len() {
        out_offsets[i + 1] += out_offsets[i];
    }
    let mut out_pos = vec![0; edges.len()];
    for (pos, &e) in out_order.iter().enumerate() {
        out_pos[e] = pos;
    }

    Ok(PlannerGraph {
        nodes,
        obstacle_vertices,
        source,
        target,
        alpha,
        l,
        chains,
        edges,
        out_offsets,
        out_order,
        out_pos,
    })
}

impl PlannerGraph {
    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn node(&self, v: NodeId) -> Point2 {
        self.nodes[v]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn obstacle_vertex_count(&self) -> usize {
        self.obstacle_vertices
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn target(&self) -> Option<NodeId> {
        self.target
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn edges(&self) -> &[ChainEdge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &ChainEdge {
        &self.edges[e]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn chains(&self) -> &[RegularChain] {
        &self.chains
    }

    pub fn chain_of(&self, e: EdgeId) -> &RegularChain {
        &self.chains[self.edges[e].chain]
    }

    /// Outgoing edges of `v` in counter-clockwise departure order.
    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_order[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Chain vertices in the edge's direction of travel.
    pub fn edge_polyline(&self, e: EdgeId) -> Vec<Point2> {
        let edge = &self.edges[e];
        self.chains[edge.chain].traversal(edge.from_start)
    }

    /// Departures allowed after arriving over `e`.
    pub fn leave_range(&self, e: EdgeId) -> AngularInterval {
        let edge = &self.edges[e];
        vlr(&self.chains[edge.chain], edge.from_start, self.alpha)
    }

    /// Fresh per-run view of every node's outgoing edges.
    pub fn edges_out(&self) -> EdgesOut<'_> {
        EdgesOut::new(self)
    }
}

/// Mutable view of all `edges_out(v)` structures for one planning run.
///
/// Edges stay in the graph's sorted order; removal marks a position dead in
/// a "next live position" forest (path-halving union-find), so a range
/// report costs a binary search plus amortized near-constant work per
/// reported or skipped-dead edge.
#[derive(Debug, Clone)]
pub struct EdgesOut<'g> {
    graph: &'g PlannerGraph,
    next: Vec<usize>,
    live: usize,
}

impl<'g> EdgesOut<'g> {
    pub fn new(graph: &'g PlannerGraph) -> Self {
        let n = graph.out_order.len();
        Self {
            graph,
            next: (0..=n).collect(),
            live: n,
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.next[i] != i {
            let up = self.next[self.next[i]];
            self.next[i] = up;
            i = up;
        }
        i
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        let pos = self.graph.out_pos[e];
        self.next[pos] == pos
    }

    /// Remove `e`; returns whether it was still present.
    pub fn remove(&mut self, e: EdgeId) -> bool {
        let pos = self.graph.out_pos[e];
        if self.next[pos] != pos {
            return false;
        }
        self.next[pos] = pos + 1;
        self.live -= 1;
        true
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Present outgoing edges of `v`, counter-clockwise.
    pub fn present(&mut self, v: NodeId) -> Vec<EdgeId> {
        self.range(v, &AngularInterval::full())
    }

    /// Present outgoing edges of `v` whose departure lies in `range`
    /// (membership per [`AngularInterval::contains`]).
    pub fn range(&mut self, v: NodeId, range: &AngularInterval) -> Vec<EdgeId> {
        let g = self.graph;
        let (start, end) = (g.out_offsets[v], g.out_offsets[v + 1]);
        let slice = &g.out_order[start..end];
        let mut out = Vec::new();
        for (lo, hi) in range.linear_pieces(EPS_ANG + 1e-12) {
            let a = start + slice.partition_point(|&e| g.edges[e].dep < lo);
            let b = start + slice.partition_point(|&e| g.edges[e].dep <= hi);
            let mut j = self.find(a);
            while j < b {
                let e = g.out_order[j];
                if range.contains(g.edges[e].dep) {
                    out.push(e);
                }
                j = self.find(j + 1);
            }
        }
        out
    }

    /// Valid successors of `e`: present edges leaving `e.tail` inside the
    /// leave range of `e`'s chain.
    pub fn vs(&mut self, e: EdgeId) -> Vec<EdgeId> {
        let range = self.graph.leave_range(e);
        self.range(self.graph.edges[e].tail, &range)
    }
}
