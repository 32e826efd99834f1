//! Heading-lattice A* comparator.
//!
//! The search moves in steps of `resolution` along one of `headings`
//! evenly spaced directions. A heading change of up to `alpha` is allowed
//! once the current leg is at least `l` long, and a final straight shot to
//! the target closes the path. Positions stay continuous; states are merged
//! per grid cell, heading and (capped) leg progress.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{signed_angle_diff, Point2};
use crate::occlusion::{build_index, Occluder};
use crate::planner::PathResult;
use crate::scene::Scene;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AstarConfig {
    /// Step length and cell size.
    pub resolution: f64,
    /// Number of discrete headings.
    pub headings: usize,
    /// Extra room around the scene bounds the search may use.
    pub margin: f64,
    /// Give up (reporting no path) after this many expansions.
    pub max_expansions: usize,
}

impl AstarConfig {
    /// Settings scaled to the scene: a step of a quarter leg (but at most
    /// 200 steps across the scene diagonal) and 72 headings.
    pub fn for_scene(scene: &Scene) -> Self {
        let (lo, hi) = scene.bounds();
        let diag = lo.distance(hi).max(scene.l);
        Self {
            resolution: (scene.l / 4.0).max(diag / 200.0),
            headings: 72,
            margin: 2.0 * scene.l + 0.25 * diag,
            max_expansions: 20_000_000,
        }
    }
}

/// Lattice A* with the given step length and heading count.
pub fn astar_plan(scene: &Scene, resolution: f64, headings: usize) -> Result<PathResult> {
    let config = AstarConfig {
        resolution,
        headings,
        ..AstarConfig::for_scene(scene)
    };
    astar_plan_with(scene, &config)
}

/// `100 * |a - b| / max(a, b)`, in percent.
pub fn relative_difference(l_rcs: f64, l_astar: f64) -> f64 {
    100.0 * (l_rcs - l_astar).abs() / l_rcs.max(l_astar)
}

#[derive(Debug, Clone, Copy)]
struct Node {
    leg_start: Point2,
    heading: usize,
    steps: u32,
    g: f64,
    parent: Option<usize>,
    at_start: bool,
    terminal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Open {
    f: f64,
    node: usize,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn astar_plan_with(scene: &Scene, cfg: &AstarConfig) -> Result<PathResult> {
    let t = scene.target.ok_or(Error::MissingTarget)?;
    if cfg.resolution.is_nan() || cfg.resolution <= 0.0 || cfg.headings < 8 {
        return Err(Error::InvalidScene(
            "resolution must be positive and headings at least 8".into(),
        ));
    }
    let s = scene.source;
    let occl = build_index(scene.segment_set());
    let res = cfg.resolution;
    let dtheta = TAU / cfg.headings as f64;
    let dirs: Vec<Point2> = (0..cfg.headings)
        .map(|h| Point2::from_angle(h as f64 * dtheta))
        .collect();
    let max_dh = (scene.alpha / dtheta + 1e-9).floor() as usize;
    let leg_steps = ((scene.l / res) - 1e-9).ceil().max(1.0) as u32;
    let (lo, hi) = scene.bounds();
    let lo = Point2::new(lo.x - cfg.margin, lo.y - cfg.margin);
    let hi = Point2::new(hi.x + cfg.margin, hi.y + cfg.margin);
    let inside = |p: Point2| p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;

    let pos_of = |n: &Node| n.leg_start + dirs[n.heading] * (f64::from(n.steps) * res);
    let key_of = |p: Point2, heading: usize, steps: u32| {
        (
            ((p.x - lo.x) / res).floor() as i64,
            ((p.y - lo.y) / res).floor() as i64,
            heading as u32,
            steps.min(leg_steps),
        )
    };

    let mut nodes = vec![Node {
        leg_start: s,
        heading: 0,
        steps: 0,
        g: 0.0,
        parent: None,
        at_start: true,
        terminal: false,
    }];
    let mut open = BinaryHeap::new();
    open.push(Open {
        f: s.distance(t),
        node: 0,
    });
    let mut best_g: HashMap<(i64, i64, u32, u32), f64> = HashMap::new();
    let mut closed: HashSet<(i64, i64, u32, u32)> = HashSet::new();
    let mut expansions = 0usize;

    let push = |nodes: &mut Vec<Node>, open: &mut BinaryHeap<Open>, node: Node, h: f64| {
        nodes.push(node);
        open.push(Open {
            f: node.g + h,
            node: nodes.len() - 1,
        });
    };

    while let Some(Open { node: id, .. }) = open.pop() {
        let cur = nodes[id];
        if cur.terminal {
            return Ok(reconstruct(&nodes, id, pos_of(&cur), t));
        }
        let pos = pos_of(&cur);
        if !cur.at_start {
            let key = key_of(pos, cur.heading, cur.steps);
            if !closed.insert(key) {
                continue;
            }
        }
        expansions += 1;
        if expansions > cfg.max_expansions {
            break;
        }

        let may_turn = cur.at_start || cur.steps >= leg_steps;
        if may_turn {
            let shot = pos.distance(t);
            let turn_ok = cur.at_start
                || signed_angle_diff(cur.heading as f64 * dtheta, pos.angle_to(t)).abs()
                    <= scene.alpha;
            if shot >= scene.l && turn_ok && !occl.blocked(pos, t, &[]) {
                let node = Node {
                    g: cur.g + shot,
                    parent: Some(id),
                    terminal: true,
                    ..cur
                };
                push(&mut nodes, &mut open, node, 0.0);
            }
        }

        let mut successors: Vec<(usize, bool)> = Vec::new();
        if cur.at_start {
            successors.extend((0..cfg.headings).map(|h| (h, true)));
        } else {
            successors.push((cur.heading, false));
            if may_turn {
                for dh in 1..=max_dh {
                    successors.push(((cur.heading + dh) % cfg.headings, true));
                    successors.push(((cur.heading + cfg.headings - dh) % cfg.headings, true));
                }
            }
        }
        for (heading, new_leg) in successors {
            let next = if new_leg {
                Node {
                    leg_start: pos,
                    heading,
                    steps: 1,
                    g: cur.g + res,
                    parent: Some(id),
                    at_start: false,
                    terminal: false,
                }
            } else {
                Node {
                    steps: cur.steps + 1,
                    g: cur.g + res,
                    parent: Some(id),
                    ..cur
                }
            };
            let p = pos_of(&next);
            if !inside(p) {
                continue;
            }
            let key = key_of(p, heading, next.steps);
            if closed.contains(&key) {
                continue;
            }
            if best_g.get(&key).is_some_and(|&g| g <= next.g) {
                continue;
            }
            if occl.blocked(pos, p, &[]) {
                continue;
            }
            best_g.insert(key, next.g);
            push(&mut nodes, &mut open, next, p.distance(t));
        }
    }
    Err(Error::NoPath)
}

/// `end_of_leg` is where the final straight shot to `t` begins.
fn reconstruct(nodes: &[Node], terminal: usize, end_of_leg: Point2, t: Point2) -> PathResult {
    let mut chain = Vec::new();
    let mut cur = nodes[terminal].parent;
    while let Some(id) = cur {
        chain.push(id);
        cur = nodes[id].parent;
    }
    chain.reverse();
    let mut pts: Vec<Point2> = Vec::new();
    for &id in &chain {
        let n = &nodes[id];
        if pts.last() != Some(&n.leg_start) {
            pts.push(n.leg_start);
        }
    }
    if pts.last() != Some(&end_of_leg) {
        pts.push(end_of_leg);
    }
    pts.push(t);
    let length = pts.windows(2).map(|w| w[0].distance(w[1])).sum();
    PathResult::from_pieces([pts.as_slice()], length, Vec::new())
}
