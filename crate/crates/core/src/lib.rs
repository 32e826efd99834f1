//! Turn-constrained path planning through polygonal obstacle fields.
//!
//! Paths are polylines whose legs are at least `l` long and whose turning
//! points turn by at most `alpha`. The planner builds a directed multigraph
//! over obstacle vertices whose edges are collision-free *regular chains*
//! (pieces of regular polygons with exterior angle `alpha`), then runs a
//! Dijkstra variant keyed on edges so that every junction respects the
//! turning limit.
//!
//! ```
//! use rcs::{build_graph, build_index, plan, Point2, Scene};
//!
//! let rod = vec![Point2::new(50.0, -30.0), Point2::new(50.0, 30.0)];
//! let scene = Scene::new(
//!     vec![rod],
//!     Point2::new(0.0, 0.0),
//!     Some(Point2::new(100.0, 0.0)),
//!     10.0,
//!     30f64.to_radians(),
//! )
//! .unwrap();
//! let occlusion = build_index(scene.segment_set());
//! let graph = build_graph(&scene, &occlusion).unwrap();
//! let path = plan(&graph, graph.source(), graph.target().unwrap()).unwrap();
//! assert!(path.length > 100.0);
//! assert!(rcs::check_path(&scene, &path).is_empty());
//! ```

pub mod baseline;
pub mod bench;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod occlusion;
pub mod planner;
pub mod query_index;
pub mod scene;

pub use baseline::{astar_plan, astar_plan_with, relative_difference, AstarConfig};
pub use error::{Error, Result};
pub use geometry::{
    arrival_angle, build_chain, departure_angle, enumerate_chains, vlr, AngularInterval,
    ChainError, Curvature, Point2, RegularChain,
};
pub use graph::{build_graph, validate_chain, ChainEdge, EdgeId, EdgesOut, NodeId, PlannerGraph};
pub use occlusion::{build_index, LinearScan, OcclusionIndex, Occluder, Segment, SegmentSet};
pub use planner::{
    check_path, check_path_with, plan, plan_directional, plan_with_stats, PathResult, PlanStats,
    Tolerances, Violation,
};
pub use query_index::{
    preprocess, preprocess_with_stats, query, query_directional, PlannerIndex, PredRange,
};
pub use scene::{Scene, SceneFile};
