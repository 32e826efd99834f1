//! Segment-blocking oracle over obstacle edges.
//!
//! [`OcclusionIndex`] is a bounding-volume hierarchy over the obstacle edges;
//! [`LinearScan`] checks every edge and serves as the reference the index is
//! tested against. Both decide contacts with the same exact predicate, so
//! their answers are identical on every query.
//!
//! A segment `pq` is blocked when it touches any obstacle edge, including
//! grazing contacts and collinear overlap, unless the contact is a single
//! point within [`IGNORE_RADIUS`] of one of the caller's `ignore` points.

use std::collections::HashMap;

use robust::{orient2d, Coord};

use crate::geometry::Point2;

/// Contacts closer than this to an ignored point do not block.
pub const IGNORE_RADIUS: f64 = 1e-9;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }
}

/// Obstacle corner: the vertex with its polygon neighbours, counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Corner {
    prev: Point2,
    at: Point2,
    next: Point2,
}

impl Corner {
    /// Whether a ray leaving the corner in direction `dir` starts out inside
    /// the polygon.
    fn enters_interior(&self, dir: Point2) -> bool {
        let e_in = self.at - self.prev;
        let e_out = self.next - self.at;
        let left_of_in = e_in.cross(dir) > 0.0;
        let left_of_out = e_out.cross(dir) > 0.0;
        if e_in.cross(e_out) > 0.0 {
            left_of_in && left_of_out
        } else {
            left_of_in || left_of_out
        }
    }
}

/// Obstacle edges, optionally with polygon structure so that rays leaving a
/// polygon vertex into the polygon can be recognised.
#[derive(Debug, Clone, Default)]
pub struct SegmentSet {
    segments: Vec<Segment>,
    corners: HashMap<(u64, u64), Corner>,
}

fn point_key(p: Point2) -> (u64, u64) {
    // +0.0 and -0.0 must hash alike
    ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits())
}

impl SegmentSet {
    /// Loose segments. Zero-length segments are dropped.
    pub fn new(segments: impl IntoIterator<Item = Segment>) -> Self {
        Self {
            segments: segments.into_iter().filter(|s| s.a != s.b).collect(),
            corners: HashMap::new(),
        }
    }

    /// Edges of closed polygons given counter-clockwise. Two-vertex polygons
    /// are treated as a single segment with no interior.
    pub fn from_polygons<'a>(polygons: impl IntoIterator<Item = &'a [Point2]>) -> Self {
        let mut set = SegmentSet::default();
        for poly in polygons {
            match poly.len() {
                0 | 1 => {}
                2 => {
                    if poly[0] != poly[1] {
                        set.segments.push(Segment::new(poly[0], poly[1]));
                    }
                }
                n => {
                    for i in 0..n {
                        let at = poly[i];
                        let next = poly[(i + 1) % n];
                        let prev = poly[(i + n - 1) % n];
                        if at != next {
                            set.segments.push(Segment::new(at, next));
                        }
                        set.corners.insert(point_key(at), Corner { prev, at, next });
                    }
                }
            }
        }
        set
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// True when `p` is a vertex of a polygon (three or more vertices) and
    /// the direction `dir` points into that polygon.
    pub fn enters_obstacle(&self, p: Point2, dir: Point2) -> bool {
        self.corners
            .get(&point_key(p))
            .is_some_and(|c| c.enters_interior(dir))
    }
}

/// Anything that can answer segment-blocking queries.
pub trait Occluder {
    fn blocked(&self, p: Point2, q: Point2, ignore: &[Point2]) -> bool;
}

fn coord(p: Point2) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Exact orientation of `c` relative to the directed line `a -> b`.
fn orient(a: Point2, b: Point2, c: Point2) -> i8 {
    sign(orient2d(coord(a), coord(b), coord(c)))
}

/// `c` lies within the bounding box of `a`-`b` (assumes collinearity).
fn within(a: Point2, b: Point2, c: Point2) -> bool {
    c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Contact {
    None,
    Point(Point2),
    Overlap(Point2, Point2),
}

fn contact(p: Point2, q: Point2, a: Point2, b: Point2) -> Contact {
    let o1 = orient(p, q, a);
    let o2 = orient(p, q, b);
    let o3 = orient(a, b, p);
    let o4 = orient(a, b, q);

    if o1 == 0 && o2 == 0 {
        // collinear: overlap of the two ranges along the dominant axis of pq
        let d = q - p;
        let t = |x: Point2| {
            if d.x.abs() >= d.y.abs() {
                (x.x - p.x) / d.x
            } else {
                (x.y - p.y) / d.y
            }
        };
        let mut ends = [(0.0, p), (1.0, q), (t(a), a), (t(b), b)];
        let (ta, tb) = (ends[2].0, ends[3].0);
        let lo = ta.min(tb).max(0.0);
        let hi = ta.max(tb).min(1.0);
        if lo > hi {
            return Contact::None;
        }
        ends.sort_by(|x, y| x.0.total_cmp(&y.0));
        // the middle two of the four sorted endpoints bound the overlap
        let (x, y) = (ends[1].1, ends[2].1);
        return if x == y {
            Contact::Point(x)
        } else {
            Contact::Overlap(x, y)
        };
    }

    if (o1 != 0 && o1 == o2) || (o3 != 0 && o3 == o4) {
        return Contact::None;
    }

    if o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        let r = q - p;
        let s = b - a;
        let t = (a - p).cross(s) / r.cross(s);
        return Contact::Point(p + r * t);
    }

    // touching: the single contact is an endpoint lying on the other segment
    if o1 == 0 && within(p, q, a) {
        Contact::Point(a)
    } else if o2 == 0 && within(p, q, b) {
        Contact::Point(b)
    } else if o3 == 0 && within(a, b, p) {
        Contact::Point(p)
    } else if o4 == 0 && within(a, b, q) {
        Contact::Point(q)
    } else {
        Contact::None
    }
}

/// Exact test for `p` lying on the closed segment `s`.
pub fn point_on_segment(p: Point2, s: &Segment) -> bool {
    orient(s.a, s.b, p) == 0 && within(s.a, s.b, p)
}

fn ignored(x: Point2, ignore: &[Point2]) -> bool {
    ignore.iter().any(|w| w.distance(x) <= IGNORE_RADIUS)
}

/// Does segment `pq` touch obstacle edge `s` anywhere outside `ignore`?
pub fn segment_blocks(p: Point2, q: Point2, s: &Segment, ignore: &[Point2]) -> bool {
    match contact(p, q, s.a, s.b) {
        Contact::None => false,
        Contact::Point(x) => !ignored(x, ignore),
        Contact::Overlap(x, y) => x.distance(y) > IGNORE_RADIUS || !ignored(x, ignore),
    }
}

/// Reference oracle: tests every edge.
#[derive(Debug, Clone, Default)]
pub struct LinearScan {
    set: SegmentSet,
}

impl LinearScan {
    pub fn new(set: SegmentSet) -> Self {
        Self { set }
    }

    pub fn segments(&self) -> &SegmentSet {
        &self.set
    }
}

impl Occluder for LinearScan {
    fn blocked(&self, p: Point2, q: Point2, ignore: &[Point2]) -> bool {
        self.set
            .segments
            .iter()
            .any(|s| segment_blocks(p, q, s, ignore))
    }
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Point2,
    max: Point2,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            min: Point2::new(f64::INFINITY, f64::INFINITY),
            max: Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: Point2) {
        self.min = Point2::new(self.min.x.min(p.x), self.min.y.min(p.y));
        self.max = Point2::new(self.max.x.max(p.x), self.max.y.max(p.y));
    }

    fn padded(mut self) -> Self {
        let scale = self
            .min
            .x
            .abs()
            .max(self.min.y.abs())
            .max(self.max.x.abs())
            .max(self.max.y.abs());
        let pad = 1e-9 * (1.0 + scale);
        self.min = Point2::new(self.min.x - pad, self.min.y - pad);
        self.max = Point2::new(self.max.x + pad, self.max.y + pad);
        self
    }

    /// Conservative segment/box overlap by slab clipping.
    fn hits_segment(&self, p: Point2, q: Point2) -> bool {
        let d = q - p;
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        for (o, dir, lo, hi) in [
            (p.x, d.x, self.min.x, self.max.x),
            (p.y, d.y, self.min.y, self.max.y),
        ] {
            if dir == 0.0 {
                if o < lo || o > hi {
                    return false;
                }
            } else {
                let inv = 1.0 / dir;
                let (mut a, mut b) = ((lo - o) * inv, (hi - o) * inv);
                if a > b {
                    std::mem::swap(&mut a, &mut b);
                }
                t0 = t0.max(a);
                t1 = t1.min(b);
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        bounds: Aabb,
        first: usize,
        count: usize,
    },
    Inner {
        bounds: Aabb,
        left: usize,
        right: usize,
    },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

/// Bounding-volume hierarchy over obstacle edges. Immutable after
/// [`build_index`]; safe to query from many threads.
#[derive(Debug, Clone)]
pub struct OcclusionIndex {
    set: SegmentSet,
    /// Edges reordered so every leaf owns a contiguous run.
    order: Vec<Segment>,
    nodes: Vec<Node>,
}

pub fn build_index(set: SegmentSet) -> OcclusionIndex {
    let mut order = set.segments.clone();
    let mut nodes = Vec::new();
    if !order.is_empty() {
        let len = order.len();
        build_node(&mut order, 0, len, &mut nodes);
    }
    OcclusionIndex { set, order, nodes }
}

fn build_node(segs: &mut [Segment], offset: usize, len: usize, nodes: &mut Vec<Node>) -> usize {
    let slice = &mut segs[offset..offset + len];
    let mut bounds = Aabb::empty();
    for s in slice.iter() {
        bounds.grow(s.a);
        bounds.grow(s.b);
    }
    let bounds = bounds.padded();
    let id = nodes.len();
    if len <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            bounds,
            first: offset,
            count: len,
        });
        return id;
    }
    let extent = bounds.max - bounds.min;
    let key = |s: &Segment| {
        let m = s.a.midpoint(s.b);
        if extent.x >= extent.y {
            m.x
        } else {
            m.y
        }
    };
    let mid = len / 2;
    slice.select_nth_unstable_by(mid, |a, b| key(a).total_cmp(&key(b)));
    nodes.push(Node::Inner {
        bounds,
        left: 0,
        right: 0,
    });
    let left = build_node(segs, offset, mid, nodes);
    let right = build_node(segs, offset + mid, len - mid, nodes);
    nodes[id] = Node::Inner {
        bounds,
        left,
        right,
    };
    id
}

impl OcclusionIndex {
    pub fn segments(&self) -> &SegmentSet {
        &self.set
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn enters_obstacle(&self, p: Point2, dir: Point2) -> bool {
        self.set.enters_obstacle(p, dir)
    }
}

impl Occluder for OcclusionIndex {
    fn blocked(&self, p: Point2, q: Point2, ignore: &[Point2]) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if !node.bounds().hits_segment(p, q) {
                continue;
            }
            match *node {
                Node::Leaf { first, count, .. } => {
                    if self.order[first..first + count]
                        .iter()
                        .any(|s| segment_blocks(p, q, s, ignore))
                    {
                        return true;
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        false
    }
}
