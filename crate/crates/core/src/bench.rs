//! Seeded benchmark suites comparing the chain planner with the lattice A*
//! baseline.
//!
//! Every suite is a list of [`BenchGroup`]s. A group is one obstacle scene
//! that is preprocessed once and then queried for each of its targets.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baseline::{astar_plan_with, relative_difference, AstarConfig};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::occlusion::build_index;
use crate::planner::PathResult;
use crate::query_index::{preprocess, query};
use crate::scene::Scene;

pub const DEFAULT_SEED: u64 = 7;

pub const SUITES: &[&str] = &[
    "multi-target",
    "alpha-sweep",
    "leg-sweep",
    "obstacle-doubling",
    "scene-rescale",
    "path-length",
    "scalability",
];

/// Obstacle and vertex counts of the scalability suite.
pub const SCALABILITY_SIZES: &[(usize, usize)] = &[
    (1, 3),
    (2, 7),
    (9, 39),
    (26, 100),
    (55, 200),
    (84, 300),
    (180, 500),
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchTarget {
    pub case: String,
    pub param: String,
    pub target: Point2,
}

/// One scene (without target) and the targets queried against it.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchGroup {
    pub suite: String,
    pub scene: Scene,
    pub targets: Vec<BenchTarget>,
}

/// One CSV line. Missing values mean "no path" or "not measured".
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub suite: String,
    pub case: String,
    pub param: String,
    pub vertices: usize,
    pub rcs_pre_ms: Option<f64>,
    pub rcs_query_ms: Option<f64>,
    pub rcs_total_ms: Option<f64>,
    pub astar_ms: Option<f64>,
    pub rcs_len: Option<f64>,
    pub astar_len: Option<f64>,
    pub rel_diff: Option<f64>,
}

impl BenchRow {
    pub fn without_timings(mut self) -> Self {
        self.rcs_pre_ms = None;
        self.rcs_query_ms = None;
        self.rcs_total_ms = None;
        self.astar_ms = None;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    /// Each timing is the minimum over this many runs.
    pub repeats: usize,
    pub astar: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            repeats: 3,
            astar: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub row: BenchRow,
    /// The group's scene with this case's target.
    pub scene: Scene,
    pub rcs: Option<PathResult>,
    pub astar: Option<PathResult>,
}

fn pt(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn rng_for(seed: u64, suite: &str) -> ChaCha8Rng {
    let salt = suite
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

/// Star-shaped polygon with `n` vertices around `center`, or a rod when
/// `n == 2`. All vertices lie within `radius` of `center`.
fn random_obstacle(rng: &mut ChaCha8Rng, center: Point2, radius: f64, n: usize) -> Vec<Point2> {
    if n == 2 {
        let d = Point2::from_angle(rng.gen_range(0.0..PI)) * (radius * rng.gen_range(0.7..1.0));
        return vec![center - d, center + d];
    }
    let base = rng.gen_range(0.0..TAU);
    (0..n)
        .map(|i| {
            let ang = base + TAU * (i as f64 + rng.gen_range(-0.3..0.3)) / n as f64;
            center + Point2::from_angle(ang) * (radius * rng.gen_range(0.6..1.0))
        })
        .collect()
}

/// Split `vertices` over `obstacles` shapes: all polygons when there are at
/// least three vertices each, otherwise triangles plus rods.
fn vertex_counts(rng: &mut ChaCha8Rng, obstacles: usize, vertices: usize) -> Vec<usize> {
    assert!(vertices >= 2 * obstacles, "need at least two vertices per obstacle");
    let mut counts = if vertices >= 3 * obstacles {
        let mut c = vec![3; obstacles];
        for _ in 0..vertices - 3 * obstacles {
            let i = rng.gen_range(0..obstacles);
            c[i] += 1;
        }
        c
    } else {
        let triangles = vertices - 2 * obstacles;
        let mut c = vec![3; triangles];
        c.resize(obstacles, 2);
        c
    };
    counts.shuffle(rng);
    counts
}

/// Obstacles placed one per chosen cell of a `cell`-sized grid anchored at
/// the origin. Grid corners are always at least a third of a cell away from
/// every obstacle.
fn grid_obstacles(
    rng: &mut ChaCha8Rng,
    cells: &[(usize, usize)],
    cell: f64,
    counts: &[usize],
) -> Vec<Vec<Point2>> {
    cells
        .iter()
        .zip(counts)
        .map(|(&(i, j), &n)| {
            let jitter = 0.05 * cell;
            let center = pt(
                (i as f64 + 0.5) * cell + rng.gen_range(-jitter..jitter),
                (j as f64 + 0.5) * cell + rng.gen_range(-jitter..jitter),
            );
            random_obstacle(rng, center, 0.3 * cell, n)
        })
        .collect()
}

fn shuffled_cells(rng: &mut ChaCha8Rng, cols: usize, rows: usize) -> Vec<(usize, usize)> {
    let mut cells: Vec<(usize, usize)> = (0..cols)
        .flat_map(|i| (0..rows).map(move |j| (i, j)))
        .collect();
    cells.shuffle(rng);
    cells
}

/// A generated field of `obstacles` shapes totalling `vertices` vertices,
/// with the source and target at opposite grid corners.
pub fn field_scene(seed: u64, obstacles: usize, vertices: usize, alpha: f64, l: f64) -> Result<Scene> {
    let mut rng = rng_for(seed, &format!("field-{obstacles}-{vertices}"));
    let cell = 150.0;
    let cols = ((obstacles as f64 * 1.3).sqrt().ceil() as usize).max(2);
    let rows = obstacles.div_ceil(cols).max(1);
    let cells = shuffled_cells(&mut rng, cols, rows);
    let counts = vertex_counts(&mut rng, obstacles, vertices);
    let polys = grid_obstacles(&mut rng, &cells[..obstacles], cell, &counts);
    Scene::new(
        polys,
        pt(0.0, 0.0),
        Some(pt(cols as f64 * cell, rows as f64 * cell)),
        l,
        alpha,
    )
}

fn without_target(scene: &Scene) -> Scene {
    Scene {
        target: None,
        ..scene.clone()
    }
}

fn single(suite: &str, scene: Scene, case: String, param: String) -> BenchGroup {
    let target = scene.target.expect("generated scenes carry a target");
    BenchGroup {
        suite: suite.into(),
        scene: without_target(&scene),
        targets: vec![BenchTarget { case, param, target }],
    }
}

/// A `size` square with a vertical rod rising from the lower part of the
/// scene to `rise` above the line between source and target, so the path
/// has to bend around its tip.
fn rod_scene(rng: &mut ChaCha8Rng, size: f64, rise: f64, l: f64, alpha: f64) -> Result<Scene> {
    let j = 0.01 * size;
    let mid = size / 2.0;
    let x = mid + rng.gen_range(-j..j);
    let rod = vec![pt(x, 0.2 * size), pt(x, mid + rise + rng.gen_range(-j..j))];
    let s = pt(0.075 * size, mid + rng.gen_range(-j..j));
    let t = pt(0.925 * size, mid + rng.gen_range(-j..j));
    Scene::new(vec![rod], s, Some(t), l, alpha)
}

/// Build the scenes of a suite.
pub fn generate_suite(name: &str, seed: u64) -> Result<Vec<BenchGroup>> {
    let mut rng = rng_for(seed, name);
    let deg = f64::to_radians;
    let groups = match name {
        "multi-target" => {
            let cell = 200.0;
            let (cols, rows) = (6, 4);
            let cells: Vec<_> = shuffled_cells(&mut rng, cols, rows)
                .into_iter()
                .collect();
            let counts: Vec<usize> = (0..cells.len()).map(|_| rng.gen_range(3..=5)).collect();
            let polys = grid_obstacles(&mut rng, &cells, cell, &counts);
            let scene = Scene::new(polys, pt(0.0, 0.0), None, 50.0, deg(30.0))?;
            let corners = [(2, 1), (3, 2), (4, 3), (6, 2), (6, 4)];
            let targets = corners
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| BenchTarget {
                    case: format!("t{}", i + 1),
                    param: format!("target=({},{})", a as f64 * cell, b as f64 * cell),
                    target: pt(a as f64 * cell, b as f64 * cell),
                })
                .collect();
            vec![BenchGroup {
                suite: name.into(),
                scene,
                targets,
            }]
        }
        "alpha-sweep" => {
            let base = rod_scene(&mut rng, 400.0, 24.0, 50.0, deg(80.0))?;
            [80.0, 40.0, 20.0, 10.0]
                .iter()
                .enumerate()
                .map(|(i, &a)| {
                    let scene = Scene { alpha: deg(a), ..base.clone() };
                    single(name, scene, format!("t{}", i + 1), format!("alpha={a}"))
                })
                .collect()
        }
        "leg-sweep" => {
            let base = rod_scene(&mut rng, 200.0, 40.0, 40.0, deg(30.0))?;
            [40.0, 20.0, 10.0, 5.0]
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    let scene = Scene { l, ..base.clone() };
                    single(name, scene, format!("t{}", i + 1), format!("l={l}"))
                })
                .collect()
        }
        "obstacle-doubling" => {
            let cells = shuffled_cells(&mut rng, 6, 6);
            let rods: Vec<Vec<Point2>> = grid_obstacles(&mut rng, &cells, 100.0, &[2; 36]);
            [2usize, 4, 8, 16, 32]
                .iter()
                .enumerate()
                .map(|(i, &count)| {
                    let scene = Scene::new(
                        rods[..count].to_vec(),
                        pt(-60.0, 350.0),
                        Some(pt(660.0, 350.0)),
                        50.0,
                        deg(30.0),
                    )?;
                    Ok(single(name, scene, format!("t{}", i + 1), format!("rods={count}")))
                })
                .collect::<Result<_>>()?
        }
        "scene-rescale" => {
            let base = rod_scene(&mut rng, 100.0, 20.0, 10.0, deg(30.0))?;
            [1.0, 2.0, 4.0, 8.0]
                .iter()
                .enumerate()
                .map(|(i, &f)| {
                    let size = 100.0 * f;
                    single(name, base.scaled(f), format!("t{}", i + 1), format!("size={size}"))
                })
                .collect()
        }
        "path-length" => {
            let heading = rng.gen_range(0.0..TAU);
            [100.0, 200.0, 400.0, 800.0]
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    let t = Point2::from_angle(heading) * d;
                    let scene = Scene::new(vec![], pt(0.0, 0.0), Some(t), 50.0, deg(30.0))?;
                    Ok(single(name, scene, format!("t{}", i + 1), format!("distance={d}")))
                })
                .collect::<Result<_>>()?
        }
        "scalability" => SCALABILITY_SIZES
            .iter()
            .enumerate()
            .map(|(i, &(o, v))| {
                let scene = field_scene(seed, o, v, deg(20.0), 60.0)?;
                Ok(single(name, scene, format!("t{}", i + 1), format!("obstacles={o}")))
            })
            .collect::<Result<_>>()?,
        other => {
            return Err(Error::InvalidScene(format!(
                "unknown suite {other:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(groups)
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn no_path_as_none(r: Result<PathResult>) -> Result<Option<PathResult>> {
    match r {
        Ok(p) => Ok(Some(p)),
        Err(Error::NoPath) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Preprocess the group's scene once, then query and run the baseline for
/// each target.
pub fn run_group(group: &BenchGroup, opts: &BenchOptions) -> Result<Vec<CaseResult>> {
    let repeats = opts.repeats.max(1);
    let mut pre_ms = f64::INFINITY;
    let mut built = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let occl = build_index(group.scene.segment_set());
        let ix = preprocess(&group.scene, &occl)?;
        pre_ms = pre_ms.min(millis(start));
        built = Some((occl, ix));
    }
    let (occl, ix) = built.expect("at least one repeat");

    let mut out = Vec::with_capacity(group.targets.len());
    for tgt in &group.targets {
        let scene = group.scene.with_target(Some(tgt.target))?;
        let mut query_ms = f64::INFINITY;
        let mut rcs = None;
        for _ in 0..repeats {
            let start = Instant::now();
            let r = query(&ix, tgt.target, &occl);
            query_ms = query_ms.min(millis(start));
            rcs = no_path_as_none(r)?;
        }
        let (astar, astar_ms) = if opts.astar {
            let cfg = AstarConfig::for_scene(&scene);
            let start = Instant::now();
            let r = no_path_as_none(astar_plan_with(&scene, &cfg))?;
            (r, Some(millis(start)))
        } else {
            (None, None)
        };
        let rcs_len = rcs.as_ref().map(|p| p.length);
        let astar_len = astar.as_ref().map(|p| p.length);
        let rel_diff = rcs_len.zip(astar_len).map(|(a, b)| relative_difference(a, b));
        out.push(CaseResult {
            row: BenchRow {
                suite: group.suite.clone(),
                case: tgt.case.clone(),
                param: tgt.param.clone(),
                vertices: scene.vertex_count(),
                rcs_pre_ms: Some(pre_ms),
                rcs_query_ms: Some(query_ms),
                rcs_total_ms: Some(pre_ms + query_ms),
                astar_ms,
                rcs_len,
                astar_len,
                rel_diff,
            },
            scene,
            rcs,
            astar,
        });
    }
    Ok(out)
}

pub fn run_suite(name: &str, seed: u64, opts: &BenchOptions) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for group in generate_suite(name, seed)? {
        out.extend(run_group(&group, opts)?);
    }
    Ok(out)
}
