mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rcs::bench::{field_scene, generate_suite, run_suite, BenchOptions, DEFAULT_SEED, SUITES};
use rcs::{
    build_graph, build_index, check_path, plan, plan_directional, preprocess, query,
    query_directional, AngularInterval, Error, PathResult, PlannerIndex, Point2, Scene, SceneFile,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "rcs", version, about = "Turn-constrained polyline path planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a path from the scene's source to its target.
    Plan {
        scene: PathBuf,
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        arrival: ArrivalArgs,
        /// Write an SVG drawing of the scene and path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the path as JSON instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify the path against the scene constraints.
        #[arg(long)]
        check: bool,
    },
    /// Build a reusable index for the scene's source.
    Preprocess { scene: PathBuf, index: PathBuf },
    /// Answer one or more targets from a stored index.
    Query {
        index: PathBuf,
        /// Target as `x,y`; repeat for several targets.
        #[arg(long, required = true, allow_hyphen_values = true)]
        target: Vec<Coord>,
        /// Refuse the index unless it was built for this scene.
        #[arg(long)]
        scene: Option<PathBuf>,
        #[command(flatten)]
        arrival: ArrivalArgs,
        #[arg(long)]
        check: bool,
    },
    /// Run a generated benchmark suite and print a CSV table.
    Bench {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long, env = "RCS_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Timing repeats; the minimum is reported.
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Skip the A* baseline.
        #[arg(long)]
        no_astar: bool,
        /// Leave timing columns empty so the table is reproducible.
        #[arg(long)]
        no_timings: bool,
    },
    /// Write a generated scene file.
    #[command(subcommand)]
    Generate(Generate),
}

#[derive(Subcommand)]
enum Generate {
    /// Random obstacle field with source and target at opposite corners.
    Field {
        #[arg(long)]
        obstacles: usize,
        #[arg(long)]
        vertices: usize,
        /// Maximum turning angle in degrees.
        #[arg(long)]
        alpha: f64,
        /// Minimum leg length.
        #[arg(long)]
        l: f64,
        #[arg(long, env = "RCS_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        out: PathBuf,
    },
    /// One scene of a benchmark suite, with its first target.
    Suite {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        /// Zero-based scene number within the suite.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, env = "RCS_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        out: PathBuf,
    },
}

#[derive(Args)]
struct TargetArgs {
    /// Target as `x,y`, overriding the scene file.
    #[arg(long, allow_hyphen_values = true)]
    target: Option<Coord>,
}

#[derive(Args)]
struct ArrivalArgs {
    /// Start of the allowed arrival directions, degrees.
    #[arg(long, requires = "arrive_to", allow_hyphen_values = true)]
    arrive_from: Option<f64>,
    /// End of the allowed arrival directions, degrees, counter-clockwise from `--arrive-from`.
    #[arg(long, requires = "arrive_from", allow_hyphen_values = true)]
    arrive_to: Option<f64>,
}

impl ArrivalArgs {
    fn interval(&self) -> Option<AngularInterval> {
        let (from, to) = (self.arrive_from?, self.arrive_to?);
        let span = to - from;
        let width = if span.abs() >= 360.0 { 360.0 } else { span.rem_euclid(360.0) };
        Some(AngularInterval::new(from.to_radians(), width.to_radians()))
    }
}

#[derive(Clone, Copy, Debug)]
struct Coord(Point2);

impl FromStr for Coord {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
        Ok(Coord(Point2::new(num(x)?, num(y)?)))
    }
}

/// Failures mapped to process exit codes.
enum Failure {
    Lib(Error),
    Violations(String),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::NoPath) => 3,
            Failure::Lib(Error::IndexMismatch(_)) => 5,
            Failure::Lib(Error::Io(_)) | Failure::Other(_) => 1,
            Failure::Lib(_) => 2,
            Failure::Violations(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Violations(v) => format!("constraint violations: {v}"),
            Failure::Other(e) => format!("{e:#}"),
        }
    }
}

type Outcome = Result<(), Failure>;

fn load_scene(path: &Path) -> Result<Scene, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(SceneFile::from_json(&text)?.into_scene()?)
}

fn write_file(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn path_json(p: &PathResult) -> String {
    json!({
        "length": p.length,
        "arrival_degrees": p.arrival_angle.to_degrees(),
        "turning_points": p.turning_points(),
        "polyline": p.polyline,
    })
    .to_string()
}

fn verify(scene: &Scene, p: &PathResult) -> Outcome {
    let v = check_path(scene, p);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violations(format!("{v:?}")))
    }
}

fn cmd_plan(
    scene: &Path,
    target: &TargetArgs,
    arrival: &ArrivalArgs,
    svg_out: Option<&Path>,
    out: Option<&Path>,
    check: bool,
) -> Outcome {
    let mut scene = load_scene(scene)?;
    if let Some(Coord(t)) = target.target {
        scene = scene.with_target(Some(t))?;
    }
    let occl = build_index(scene.segment_set());
    let start = Instant::now();
    let g = build_graph(&scene, &occl)?;
    let t = g.target().ok_or(Error::MissingTarget)?;
    let result = match arrival.interval() {
        Some(theta) => plan_directional(&g, g.source(), t, &theta),
        None => plan(&g, g.source(), t),
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let path = result?;
    println!("d={}", path.length);
    println!("plan_ms={ms:.3}");
    match out {
        Some(file) => write_file(file, &path_json(&path))?,
        None => println!("{}", path_json(&path)),
    }
    if let Some(file) = svg_out {
        write_file(file, &svg::render(&scene, &[&path.polyline]))?;
    }
    if check {
        verify(&scene, &path)?;
    }
    Ok(())
}

fn cmd_preprocess(scene: &Path, index: &Path) -> Outcome {
    let scene = load_scene(scene)?.with_target(None)?;
    let start = Instant::now();
    let occl = build_index(scene.segment_set());
    let ix = preprocess(&scene, &occl)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    ix.save(index)?;
    println!("preprocess_ms={ms:.3}");
    println!("nodes={} edges={}", ix.nodes().len(), ix.edges().len());
    Ok(())
}

fn cmd_query(
    index: &Path,
    targets: &[Coord],
    scene: Option<&Path>,
    arrival: &ArrivalArgs,
    check: bool,
) -> Outcome {
    let ix = PlannerIndex::load(index)?;
    if let Some(file) = scene {
        ix.check_scene(&load_scene(file)?)?;
    }
    let occl = build_index(ix.scene().segment_set());
    let theta = arrival.interval();
    let mut first_error = None;
    for &Coord(t) in targets {
        let start = Instant::now();
        let result = match &theta {
            Some(theta) => query_directional(&ix, t, &occl, theta),
            None => query(&ix, t, &occl),
        };
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(path) => {
                println!("target={},{} d={} query_ms={ms:.3}", t.x, t.y, path.length);
                println!("{}", path_json(&path));
                if check {
                    verify(&ix.scene().with_target(Some(t))?, &path)?;
                }
            }
            Err(e) => {
                println!("target={},{} error={e}", t.x, t.y);
                first_error.get_or_insert(e);
            }
        }
    }
    match first_error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn cmd_bench(suite: &str, seed: u64, repeats: usize, astar: bool, timings: bool) -> Outcome {
    let opts = BenchOptions { repeats, astar };
    let rows = run_suite(suite, seed, &opts)?;
    println!("# seed={seed} suite={suite}");
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for r in rows {
        let row = if timings { r.row } else { r.row.without_timings() };
        w.serialize(row).context("writing CSV")?;
    }
    w.flush().context("writing CSV")?;
    Ok(())
}

fn cmd_generate(g: &Generate) -> Outcome {
    let (scene, out) = match g {
        Generate::Field { obstacles, vertices, alpha, l, seed, out } => {
            (field_scene(*seed, *obstacles, *vertices, alpha.to_radians(), *l)?, out)
        }
        Generate::Suite { suite, index, seed, out } => {
            let groups = generate_suite(suite, *seed)?;
            let group = groups.get(*index).ok_or_else(|| {
                anyhow::anyhow!("suite {suite} has {} scenes", groups.len())
            })?;
            (group.scene.with_target(Some(group.targets[0].target))?, out)
        }
    };
    write_file(out, &SceneFile::from_scene(&scene).to_json())?;
    println!("obstacles={} vertices={}", scene.obstacles.len(), scene.vertex_count());
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Plan { scene, target, arrival, svg, out, check } => {
            cmd_plan(scene, target, arrival, svg.as_deref(), out.as_deref(), *check)
        }
        Command::Preprocess { scene, index } => cmd_preprocess(scene, index),
        Command::Query { index, target, scene, arrival, check } => {
            cmd_query(index, target, scene.as_deref(), arrival, *check)
        }
        Command::Bench { suite, seed, repeats, no_astar, no_timings } => {
            cmd_bench(suite, *seed, *repeats, !no_astar, !no_timings)
        }
        Command::Generate(g) => cmd_generate(g),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
