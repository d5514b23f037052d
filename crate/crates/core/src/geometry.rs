//! Domains, collocation clouds and ray exit distances.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist2(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        dx * dx + dy * dy
    }
}

/// Closed simple polygon, vertices in the stored order (implicitly closed).
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::Config(format!("polygon needs at least 3 vertices, got {}", vertices.len())));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::Config("polygon vertex is not finite".into()));
        }
        let poly = Self { vertices };
        if !(poly.signed_area().abs() > 0.0) {
            return Err(Error::Config("polygon has zero area".into()));
        }
        if let Some((a, b)) = poly.first_self_intersection() {
            return Err(Error::Config(format!("polygon edges {a} and {b} intersect")));
        }
        Ok(poly)
    }

    /// One `x y` pair per line; blank lines and `#` comments are skipped.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
            let err = |msg: String| Error::Parse { path: origin.to_string(), line: lineno + 1, msg };
            if nums.len() != 2 {
                return Err(err(format!("expected `x y`, found `{line}`")));
            }
            let x = nums[0].parse::<f64>().map_err(|_| err(format!("bad number `{}`", nums[0])))?;
            let y = nums[1].parse::<f64>().map_err(|_| err(format!("bad number `{}`", nums[1])))?;
            vertices.push(Point::new(x, y));
        }
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.x * b.y - b.x * a.y).sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    fn first_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        let edges: Vec<_> = self.edges().collect();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a, b) = edges[i];
                let (c, d) = edges[j];
                if adjacent {
                    // Adjacent edges share one vertex; they may only overlap
                    // if they fold back onto each other.
                    let shared = if j == i + 1 { b } else { a };
                    let (p, q) = if j == i + 1 { (a, d) } else { (b, c) };
                    let cross = (p.x - shared.x) * (q.y - shared.y) - (p.y - shared.y) * (q.x - shared.x);
                    let dot = (p.x - shared.x) * (q.x - shared.x) + (p.y - shared.y) * (q.y - shared.y);
                    if cross == 0.0 && dot > 0.0 {
                        return Some((i, j));
                    }
                } else if segments_intersect(a, b, c, d) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        self.vertices.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(x0, x1, y0, y1), v| (x0.min(v.x), x1.max(v.x), y0.min(v.y), y1.max(v.y)),
        )
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let (ux, uy) = (b.x - a.x, b.y - a.y);
    let len2 = ux * ux + uy * uy;
    let t = if len2 > 0.0 { (((p.x - a.x) * ux + (p.y - a.y) * uy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    p.dist(Point::new(a.x + t * ux, a.y + t * uy))
}

/// Parameter `t >= 0` where the ray `p + t (dx, dy)` crosses segment `ab`.
fn ray_segment_hit(p: Point, dx: f64, dy: f64, a: Point, b: Point) -> Option<f64> {
    let (ex, ey) = (b.x - a.x, b.y - a.y);
    let denom = dx * ey - dy * ex;
    if denom == 0.0 {
        return None;
    }
    let (wx, wy) = (a.x - p.x, a.y - p.y);
    let t = (wx * ey - wy * ex) / denom;
    let s = (wx * dy - wy * dx) / denom;
    let eps = 1e-12;
    (t >= -eps && (-eps..=1.0 + eps).contains(&s)).then_some(t.max(0.0))
}

/// A rectangle or a simple polygon in metres.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain2D {
    Rectangle { x_min: f64, x_max: f64, y_min: f64, y_max: f64 },
    Polygon(Polygon),
}

impl Domain2D {
    pub fn rectangle(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if !(x_max > x_min) || !(y_max > y_min) || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(Error::Config(format!(
                "degenerate rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Domain2D::Rectangle { x_min, x_max, y_min, y_max })
    }

    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match self {
            Domain2D::Rectangle { x_min, x_max, y_min, y_max } => (*x_min, *x_max, *y_min, *y_max),
            Domain2D::Polygon(p) => p.bounds(),
        }
    }

    pub fn diameter(&self) -> f64 {
        let (x0, x1, y0, y1) = self.bounds();
        (x1 - x0).hypot(y1 - y0)
    }

    fn scale_tol(&self) -> f64 {
        1e-10 * self.diameter()
    }

    /// Distance from `p` to the boundary curve.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match self {
            Domain2D::Rectangle { x_min, x_max, y_min, y_max } => {
                let inside = p.x >= *x_min && p.x <= *x_max && p.y >= *y_min && p.y <= *y_max;
                if inside {
                    (p.x - x_min).min(x_max - p.x).min(p.y - y_min).min(y_max - p.y)
                } else {
                    let dx = (x_min - p.x).max(p.x - x_max).max(0.0);
                    let dy = (y_min - p.y).max(p.y - y_max).max(0.0);
                    dx.hypot(dy)
                }
            }
            Domain2D::Polygon(poly) => {
                poly.edges().map(|(a, b)| point_segment_dist(p, a, b)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn on_boundary(&self, p: Point) -> bool {
        self.boundary_distance(p) <= self.scale_tol()
    }

    /// Strict interior test; points on the boundary are not inside.
    pub fn contains(&self, p: Point) -> bool {
        if self.on_boundary(p) {
            return false;
        }
        match self {
            Domain2D::Rectangle { x_min, x_max, y_min, y_max } => {
                p.x > *x_min && p.x < *x_max && p.y > *y_min && p.y < *y_max
            }
            Domain2D::Polygon(poly) => polygon_even_odd(poly, p, self.scale_tol()),
        }
    }

    pub fn contains_closed(&self, p: Point) -> bool {
        self.on_boundary(p) || self.contains(p)
    }

    /// Length of the segment from `p` along `(cos theta, sin theta)` until the
    /// ray first leaves the domain. Zero for a boundary point whose ray
    /// leaves immediately.
    pub fn ray_exit_distance(&self, p: Point, theta: f64) -> Result<f64> {
        if !self.contains_closed(p) {
            return Err(Error::Domain(format!("point ({}, {}) is outside the domain", p.x, p.y)));
        }
        let (dx, dy) = (theta.cos(), theta.sin());
        Ok(match self {
            Domain2D::Rectangle { x_min, x_max, y_min, y_max } => {
                slab_exit(p.x, dx, *x_min, *x_max).min(slab_exit(p.y, dy, *y_min, *y_max)).max(0.0)
            }
            Domain2D::Polygon(poly) => {
                let tol = self.scale_tol();
                let mut hits: Vec<f64> = poly
                    .edges()
                    .filter_map(|(a, b)| ray_segment_hit(p, dx, dy, a, b))
                    .filter(|&t| t > tol)
                    .collect();
                hits.sort_by(f64::total_cmp);
                let Some(&first) = hits.first() else { return Ok(0.0) };
                let mid = Point::new(p.x + 0.5 * first * dx, p.y + 0.5 * first * dy);
                if self.contains_closed(mid) {
                    first
                } else {
                    0.0
                }
            }
        })
    }
}

fn slab_exit(x: f64, d: f64, lo: f64, hi: f64) -> f64 {
    if d > 0.0 {
        (hi - x) / d
    } else if d < 0.0 {
        (lo - x) / d
    } else {
        f64::INFINITY
    }
}

/// Even-odd crossing count. The test ray is rotated by a fixed small angle
/// whenever it would pass through a vertex.
fn polygon_even_odd(poly: &Polygon, p: Point, tol: f64) -> bool {
    const PERTURBATIONS: [f64; 6] = [0.0, 1.3e-3, -2.9e-3, 4.7e-3, -6.1e-3, 7.9e-3];
    let mut angle = 0.0;
    for &a in &PERTURBATIONS {
        angle = a;
        let (dx, dy) = (a.cos(), a.sin());
        let grazes = poly.vertices().iter().any(|v| {
            let (wx, wy) = (v.x - p.x, v.y - p.y);
            (wx * dx + wy * dy) > 0.0 && (wx * dy - wy * dx).abs() <= tol
        });
        if !grazes {
            break;
        }
    }
    let (dx, dy) = (angle.cos(), angle.sin());
    let crossings = poly.edges().filter(|&(a, b)| ray_segment_hit(p, dx, dy, a, b).is_some_and(|t| t > 0.0)).count();
    crossings % 2 == 1
}

/// Collocation points: `interior` first, then `boundary`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub interior: Vec<Point>,
    pub boundary: Vec<Point>,
    /// Lattice spacing the cloud was generated with.
    pub spacing: f64,
}

impl PointCloud {
    pub fn m(&self) -> usize {
        self.interior.len()
    }

    pub fn n(&self) -> usize {
        self.boundary.len()
    }

    pub fn len(&self) -> usize {
        self.m() + self.n()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points in collocation order.
    pub fn points(&self) -> Vec<Point> {
        self.interior.iter().chain(&self.boundary).copied().collect()
    }
}

/// Interior nodes closer than this fraction of `dx` to the boundary are
/// dropped; they would nearly duplicate a boundary node.
pub const BOUNDARY_CLEARANCE: f64 = 0.5;

/// Lattice interior nodes plus boundary nodes spaced about `dx` apart.
///
/// Interior nodes are `(x_min + i dx, y_min + j dx)` in row-major order (rows
/// of constant `y`). Rectangle edges are split into `round(len / dx)` equal
/// pieces starting from the lower-left corner counter-clockwise; polygon
/// boundaries are resampled by arc length from the first vertex.
pub fn generate_cloud(domain: &Domain2D, dx: f64) -> Result<PointCloud> {
    if !(dx > 0.0) || !dx.is_finite() {
        return Err(Error::Config(format!("lattice spacing must be positive, got {dx}")));
    }
    let (x0, x1, y0, y1) = domain.bounds();
    let nx = ((x1 - x0) / dx + 1e-9).floor() as usize;
    let ny = ((y1 - y0) / dx + 1e-9).floor() as usize;
    let clearance = BOUNDARY_CLEARANCE * dx * (1.0 - 1e-9);

    let mut interior = Vec::new();
    for j in 0..=ny {
        let y = y0 + j as f64 * dx;
        for i in 0..=nx {
            let p = Point::new(x0 + i as f64 * dx, y);
            if domain.contains(p) && domain.boundary_distance(p) >= clearance {
                interior.push(p);
            }
        }
    }
    if interior.is_empty() {
        return Err(Error::Config(format!("spacing {dx} leaves no interior collocation points")));
    }

    let boundary = match domain {
        Domain2D::Rectangle { x_min, x_max, y_min, y_max } => {
            let corners = [
                Point::new(*x_min, *y_min),
                Point::new(*x_max, *y_min),
                Point::new(*x_max, *y_max),
                Point::new(*x_min, *y_max),
            ];
            let mut pts = Vec::new();
            for e in 0..4 {
                let (a, b) = (corners[e], corners[(e + 1) % 4]);
                let pieces = ((a.dist(b) / dx).round() as usize).max(1);
                for k in 0..pieces {
                    let s = k as f64 / pieces as f64;
                    pts.push(Point::new(a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)));
                }
            }
            pts
        }
        Domain2D::Polygon(poly) => resample_boundary(poly, dx),
    };
    Ok(PointCloud { interior, boundary, spacing: dx })
}

fn resample_boundary(poly: &Polygon, dx: f64) -> Vec<Point> {
    let perimeter = poly.perimeter();
    let count = ((perimeter / dx).round() as usize).max(3);
    let step = perimeter / count as f64;
    let edges: Vec<_> = poly.edges().collect();
    let mut pts = Vec::with_capacity(count);
    let mut edge = 0;
    let mut edge_start = 0.0;
    for k in 0..count {
        let s = k as f64 * step;
        while edge + 1 < edges.len() && s > edge_start + edges[edge].0.dist(edges[edge].1) {
            edge_start += edges[edge].0.dist(edges[edge].1);
            edge += 1;
        }
        let (a, b) = edges[edge];
        let len = a.dist(b);
        let u = if len > 0.0 { ((s - edge_start) / len).clamp(0.0, 1.0) } else { 0.0 };
        pts.push(Point::new(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)));
    }
    pts
}

/// Regular `nx` by `ny` node lattice spanning the domain bounding box, row-major
/// with `x` fastest.
pub fn regular_grid(domain: &Domain2D, nx: usize, ny: usize) -> Vec<Point> {
    let (x0, x1, y0, y1) = domain.bounds();
    let step = |lo: f64, hi: f64, n: usize, i: usize| if n > 1 { lo + (hi - lo) * i as f64 / (n - 1) as f64 } else { 0.5 * (lo + hi) };
    (0..ny)
        .flat_map(|j| (0..nx).map(move |i| Point::new(step(x0, x1, nx, i), step(y0, y1, ny, j))))
        .collect()
}
