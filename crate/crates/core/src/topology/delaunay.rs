//! Bowyer-Watson Delaunay triangulation over points in the unit square.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;

use super::graph::AgentId;

/// Magnitude of the jitter applied to every sampled point so that exactly
/// collinear or cocircular inputs do not reach the triangulator.
pub const JITTER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Samples `n` uniform points, jitters them, and returns the Delaunay edges.
pub(crate) fn random_delaunay_edges<R: Rng>(n: usize, rng: &mut R) -> BTreeSet<(AgentId, AgentId)> {
    let points = sample_points(n, rng);
    triangulation_edges(&points)
}

pub fn sample_points<R: Rng>(n: usize, rng: &mut R) -> Vec<Point> {
    let mut points: Vec<Point> = (0..n)
        .map(|_| Point {
            x: rng.gen::<f64>(),
            y: rng.gen::<f64>(),
        })
        .collect();
    for p in &mut points {
        p.x += JITTER * (rng.gen::<f64>() - 0.5);
        p.y += JITTER * (rng.gen::<f64>() - 0.5);
    }
    points
}

/// Undirected edge set of the Delaunay triangulation of `points`.
pub fn triangulation_edges(points: &[Point]) -> BTreeSet<(AgentId, AgentId)> {
    let mut edges = BTreeSet::new();
    if points.len() == 2 {
        edges.insert((0, 1));
        return edges;
    }
    for [a, b, c] in triangulate(points) {
        for (u, v) in [(a, b), (b, c), (a, c)] {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    edges
}

/// Triangles as sorted index triples into `points`.
pub fn triangulate(points: &[Point]) -> Vec<[usize; 3]> {
    let n = points.len();
    if n < 3 {
        return Vec::new();
    }
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-12);
    let (cx, cy) = ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0);
    let big = span * 1e4;

    // Super-triangle vertices take indices n, n+1, n+2.
    let mut all: Vec<Point> = points.to_vec();
    all.push(Point { x: cx - 2.0 * big, y: cy - big });
    all.push(Point { x: cx + 2.0 * big, y: cy - big });
    all.push(Point { x: cx, y: cy + 2.0 * big });

    let mut triangles: Vec<Triangle> = vec![Triangle::new(&all, [n, n + 1, n + 2])];

    for i in 0..n {
        let p = all[i];
        let (bad, good): (Vec<Triangle>, Vec<Triangle>) =
            triangles.into_iter().partition(|t| t.circumcircle_contains(p));
        triangles = good;

        // Boundary of the cavity: edges belonging to exactly one bad triangle.
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &bad {
            for e in t.edges() {
                *edge_count.entry(e).or_default() += 1;
            }
        }
        let mut boundary: Vec<(usize, usize)> = edge_count
            .into_iter()
            .filter_map(|(e, c)| (c == 1).then_some(e))
            .collect();
        boundary.sort_unstable();
        for (a, b) in boundary {
            triangles.push(Triangle::new(&all, [a, b, i]));
        }
    }

    let mut out: Vec<[usize; 3]> = triangles
        .into_iter()
        .filter(|t| t.vertices.iter().all(|&v| v < n))
        .map(|t| {
            let mut v = t.vertices;
            v.sort_unstable();
            v
        })
        .collect();
    out.sort_unstable();
    out
}

#[derive(Debug, Clone)]
struct Triangle {
    vertices: [usize; 3],
    center: Point,
    radius_sq: f64,
}

impl Triangle {
    fn new(points: &[Point], vertices: [usize; 3]) -> Self {
        let (center, radius_sq) = circumcircle(
            points[vertices[0]],
            points[vertices[1]],
            points[vertices[2]],
        );
        Self {
            vertices,
            center,
            radius_sq,
        }
    }

    fn circumcircle_contains(&self, p: Point) -> bool {
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        dx * dx + dy * dy < self.radius_sq
    }

    fn edges(&self) -> [(usize, usize); 3] {
        let [a, b, c] = self.vertices;
        let e = |u: usize, v: usize| (u.min(v), u.max(v));
        [e(a, b), e(b, c), e(a, c)]
    }
}

/// Circumcenter and squared circumradius. Degenerate (collinear) triples get
/// an infinite circle so they are always replaced.
pub fn circumcircle(a: Point, b: Point, c: Point) -> (Point, f64) {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d.abs() < f64::EPSILON * 1e-6 {
        return (Point { x: 0.0, y: 0.0 }, f64::INFINITY);
    }
    let a2 = a.x * a.x + a.y * a.y;
    let b2 = b.x * b.x + b.y * b.y;
    let c2 = c.x * c.x + c.y * c.y;
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let center = Point { x: ux, y: uy };
    let r2 = (a.x - ux).powi(2) + (a.y - uy).powi(2);
    (center, r2)
}
