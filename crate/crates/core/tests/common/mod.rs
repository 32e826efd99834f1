#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rcs::{AngularInterval, EdgeId, NodeId, PlannerGraph, Point2, Scene};
use std::f64::consts::{PI, TAU};

pub fn pt(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

/// Exhaustive search over edge sequences from `s` to `t` in which each edge
/// is used at most once and every junction respects the leave range. The
/// departure filter is a plain scan over all outgoing edges. Returns the
/// optimal length, or `None` when `t` cannot be reached.
pub fn brute_force(g: &PlannerGraph, s: NodeId, t: NodeId, theta: Option<&AngularInterval>) -> Option<f64> {
    struct Dfs<'a> {
        g: &'a PlannerGraph,
        t: NodeId,
        theta: Option<&'a AngularInterval>,
        used: Vec<bool>,
        best_to: Vec<f64>,
        best: f64,
    }

    impl Dfs<'_> {
        fn walk(&mut self, e: EdgeId, len: f64) {
            if len >= self.best || len >= self.best_to[e] {
                return;
            }
            self.best_to[e] = len;
            let edge = self.g.edge(e);
            if edge.tail == self.t {
                if self.theta.is_none_or(|th| th.contains(edge.arr)) {
                    self.best = len;
                }
                return;
            }
            let range = self.g.leave_range(e);
            let next: Vec<EdgeId> = self
                .g
                .edges()
                .iter()
                .filter(|n| n.head == edge.tail && !self.used[n.id] && range.contains(n.dep))
                .map(|n| n.id)
                .collect();
            self.used[e] = true;
            for n in next {
                let w = self.g.edge(n).w;
                self.walk(n, len + w);
            }
            self.used[e] = false;
        }
    }

    let mut dfs = Dfs {
        g,
        t,
        theta,
        used: vec![false; g.edge_count()],
        best_to: vec![f64::INFINITY; g.edge_count()],
        best: f64::INFINITY,
    };
    let first: Vec<EdgeId> = g.edges().iter().filter(|e| e.head == s).map(|e| e.id).collect();
    for e in first {
        dfs.walk(e, g.edge(e).w);
    }
    dfs.best.is_finite().then_some(dfs.best)
}

/// Random shape of `n` vertices (a rod when `n == 2`) within `radius` of
/// `center`.
pub fn shape(rng: &mut ChaCha8Rng, center: Point2, radius: f64, n: usize) -> Vec<Point2> {
    if n == 2 {
        let d = Point2::from_angle(rng.gen_range(0.0..PI)) * radius;
        return vec![center - d, center + d];
    }
    let base = rng.gen_range(0.0..TAU);
    (0..n)
        .map(|i| {
            let a = base + TAU * (i as f64 + rng.gen_range(-0.3..0.3)) / n as f64;
            center + Point2::from_angle(a) * (radius * rng.gen_range(0.5..1.0))
        })
        .collect()
}

/// Obstacles in distinct cells of a 3x3 grid over `[0, 150]^2`, with at
/// most `max_vertices` vertices in total.
pub fn random_obstacles(rng: &mut ChaCha8Rng, max_shapes: usize, max_vertices: usize) -> Vec<Vec<Point2>> {
    let mut cells: Vec<usize> = (0..9).collect();
    for i in (1..cells.len()).rev() {
        cells.swap(i, rng.gen_range(0..=i));
    }
    let shapes = rng.gen_range(0..=max_shapes);
    let mut budget = max_vertices;
    let mut out = Vec::new();
    for &c in cells.iter().take(shapes) {
        if budget < 2 {
            break;
        }
        let n = rng.gen_range(2..=budget.min(5));
        budget -= n;
        let center = pt(
            25.0 + 50.0 * (c % 3) as f64 + rng.gen_range(-4.0..4.0),
            25.0 + 50.0 * (c / 3) as f64 + rng.gen_range(-4.0..4.0),
        );
        let radius = rng.gen_range(8.0..18.0);
        out.push(shape(rng, center, radius, n));
    }
    out
}

/// A free point in `[-30, 180]^2`.
pub fn free_point(rng: &mut ChaCha8Rng, obstacles: &[Vec<Point2>]) -> Point2 {
    let probe = Scene::new(obstacles.to_vec(), pt(-1000.0, -1000.0), None, 1.0, 1.0).unwrap();
    loop {
        let p = pt(rng.gen_range(-30.0..180.0), rng.gen_range(-30.0..180.0));
        if probe.is_free(p) {
            return p;
        }
    }
}

/// Scene with up to `max_vertices` obstacle vertices and random source and
/// target.
pub fn random_scene(
    rng: &mut ChaCha8Rng,
    max_shapes: usize,
    max_vertices: usize,
    l: f64,
    alpha: f64,
) -> Scene {
    loop {
        let obstacles = random_obstacles(rng, max_shapes, max_vertices);
        let s = free_point(rng, &obstacles);
        let t = free_point(rng, &obstacles);
        if s.distance(t) < 1.0 {
            continue;
        }
        if let Ok(scene) = Scene::new(obstacles, s, Some(t), l, alpha) {
            return scene;
        }
    }
}

pub fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
