//! Planar primitives: points, polygonal paths, convex hulls, shoelace area,
//! perimeter, support function and radial function of a polygonal trace.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Unit vector `(cos θ, sin θ)`.
    #[inline]
    pub fn unit(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point2 { x: c, y: s }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    #[inline]
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    fn lex_cmp(&self, other: &Point2) -> Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

/// Orientation of the turn `a -> b -> c`; positive for a left (ccw) turn.
#[inline]
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// A discretized trajectory `w_0, w_1, ..., w_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonalPath {
    vertices: Vec<Point2>,
}

impl PolygonalPath {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("polygonal path needs at least one vertex".into()));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite path vertex at index {i}")));
        }
        Ok(PolygonalPath { vertices })
    }

    /// Caller guarantees a nonempty, finite vertex list.
    pub(crate) fn from_trusted(vertices: Vec<Point2>) -> Self {
        debug_assert!(!vertices.is_empty());
        PolygonalPath { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn start(&self) -> Point2 {
        self.vertices[0]
    }

    pub fn last(&self) -> Point2 {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn into_vertices(self) -> Vec<Point2> {
        self.vertices
    }
}

/// Strictly convex polygon, vertices counterclockwise, closed implicitly.
///
/// One vertex (a point) and two vertices (a segment) are legal degenerate
/// hulls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        polygon_area(self)
    }

    pub fn perimeter(&self) -> f64 {
        polygon_perimeter(self)
    }

    /// `true` if `p` is inside or on the boundary, with `tol` slack on the
    /// per-edge orientation test.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0].dist(p) <= tol,
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                let len = a.dist(b);
                orient(a, b, p).abs() <= tol * len.max(1.0)
                    && (p - a).dot(b - a) >= -tol
                    && (p - b).dot(a - b) >= -tol
            }
            n => (0..n).all(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                orient(a, b, p) >= -tol
            }),
        }
    }
}

/// Andrew's monotone chain on an owned buffer. Exact cross-product signs,
/// collinear points dropped. Assumes finite input.
fn monotone_chain(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_unstable_by(Point2::lex_cmp);
    pts.dedup();
    let n = pts.len();
    if n <= 2 {
        return pts;
    }

    let mut hull: Vec<Point2> = Vec::with_capacity(2 * n);
    for &p in &pts {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

pub fn convex_hull(points: &[Point2]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::InvalidInput("convex hull of an empty point set".into()));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite coordinate at index {i}")));
    }
    Ok(ConvexPolygon {
        vertices: monotone_chain(points.to_vec()),
    })
}

/// Shoelace area; zero for fewer than three vertices.
pub fn polygon_area(p: &ConvexPolygon) -> f64 {
    let v = &p.vertices;
    if v.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..v.len() {
        twice += v[i].cross(v[(i + 1) % v.len()]);
    }
    0.5 * twice
}

/// Sum of edge lengths including the closing edge. A segment hull counts
/// both directions, matching Cauchy's formula.
pub fn polygon_perimeter(p: &ConvexPolygon) -> f64 {
    let v = &p.vertices;
    match v.len() {
        0 | 1 => 0.0,
        n => (0..n).map(|i| v[i].dist(v[(i + 1) % n])).sum(),
    }
}

/// Support function `h(θ) = max_i <w_i, e_θ>` of a path, with the index of
/// the first maximizing vertex.
pub fn directional_max(theta: f64, path: &PolygonalPath) -> (f64, usize) {
    let e = Point2::unit(theta);
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for (i, w) in path.vertices.iter().enumerate() {
        let v = w.dot(e);
        if v > best {
            best = v;
            arg = i;
        }
    }
    (best, arg)
}

const PARALLEL_DET: f64 = 1e-14;
const ON_RAY_TOL: f64 = 1e-12;

/// Largest `ρ ≥ 0` with `ρ e` on the segment `[p, q]`, if any.
///
/// `e` must be a unit vector.
#[inline]
pub fn ray_segment_hit(e: Point2, p: Point2, q: Point2) -> Option<f64> {
    let d = q - p;
    let det = d.cross(e);
    let mut best: Option<f64> = None;
    if det.abs() >= PARALLEL_DET {
        let s = e.cross(p) / det;
        let rho = d.cross(p) / det;
        if (0.0..=1.0).contains(&s) && rho >= 0.0 {
            best = Some(rho);
        }
    }
    for w in [p, q] {
        if e.cross(w).abs() <= ON_RAY_TOL {
            let rho = w.dot(e);
            if rho >= 0.0 && best.is_none_or(|b| rho > b) {
                best = Some(rho);
            }
        }
    }
    best
}

/// Radial function `r(θ)` of the polygonal trace: the farthest admissible
/// ray–segment intersection. Zero when only the origin lies on the ray.
pub fn ray_polyline_max_intersection(theta: f64, path: &PolygonalPath) -> f64 {
    let e = Point2::unit(theta);
    path.segments()
        .filter_map(|(p, q)| ray_segment_hit(e, p, q))
        .fold(0.0, f64::max)
}

/// `r(θ_k)` for the `m` equally spaced angles `θ_k = 2πk/m`.
///
/// Equal, value for value, to calling [`ray_polyline_max_intersection`] at
/// every angle; each segment is only tested against the rays inside its
/// angular span.
pub fn radial_profile(path: &PolygonalPath, m: usize) -> Vec<f64> {
    let step = 2.0 * PI / m as f64;
    let dirs: Vec<Point2> = (0..m).map(|k| Point2::unit(k as f64 * step)).collect();
    let mut r = vec![0.0_f64; m];

    // Endpoints within this radius may pass the on-ray tolerance for rays
    // well outside their angular span.
    const NEAR_ORIGIN: f64 = 1e-6;
    const ANGLE_PAD: f64 = 2e-6;

    let v = path.vertices();
    let mut angle_p = v[0].y.atan2(v[0].x);
    for w in v.windows(2) {
        let (p, q) = (w[0], w[1]);
        let angle_q = q.y.atan2(q.x);
        let ap = angle_p;
        angle_p = angle_q;
        if p.norm_sq() < NEAR_ORIGIN * NEAR_ORIGIN || q.norm_sq() < NEAR_ORIGIN * NEAR_ORIGIN {
            for (k, &e) in dirs.iter().enumerate() {
                if let Some(rho) = ray_segment_hit(e, p, q) {
                    r[k] = r[k].max(rho);
                }
            }
            continue;
        }
        let sweep = if p.cross(q) == 0.0 && p.dot(q) < 0.0 {
            PI
        } else {
            let mut d = angle_q - ap;
            if d > PI {
                d -= 2.0 * PI;
            } else if d <= -PI {
                d += 2.0 * PI;
            }
            d
        };
        let (lo, hi) = if sweep >= 0.0 {
            (ap, ap + sweep)
        } else {
            (ap + sweep, ap)
        };
        let k_lo = ((lo - ANGLE_PAD) / step).ceil() as i64;
        let k_hi = ((hi + ANGLE_PAD) / step).floor() as i64;
        for k in k_lo..=k_hi {
            let idx = k.rem_euclid(m as i64) as usize;
            if let Some(rho) = ray_segment_hit(dirs[idx], p, q) {
                r[idx] = r[idx].max(rho);
            }
        }
    }
    r
}

/// Streaming convex hull with O(hull + chunk) memory.
///
/// Points strictly inside the hull of everything flushed so far cannot be
/// vertices of the final hull and are discarded on arrival; the rest are
/// merged in batches.
#[derive(Debug, Clone)]
pub struct HullAccumulator {
    hull: Vec<Point2>,
    pending: Vec<Point2>,
    chunk: usize,
}

impl Default for HullAccumulator {
    fn default() -> Self {
        Self::with_chunk(64)
    }
}

impl HullAccumulator {
    pub fn with_chunk(chunk: usize) -> Self {
        HullAccumulator {
            hull: Vec::new(),
            pending: Vec::with_capacity(chunk),
            chunk: chunk.max(8),
        }
    }

    pub fn clear(&mut self) {
        self.hull.clear();
        self.pending.clear();
    }

    #[inline]
    pub fn push(&mut self, p: Point2) {
        if strictly_inside(&self.hull, p) {
            return;
        }
        self.pending.push(p);
        if self.pending.len() >= self.chunk {
            self.flush();
        }
    }

    fn flush(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        let mut buf = std::mem::take(&mut self.pending);
        buf.extend_from_slice(&self.hull);
        self.hull = monotone_chain(buf);
        self.pending = Vec::with_capacity(self.chunk);
    }

    pub fn finish(&mut self) -> ConvexPolygon {
        self.flush();
        ConvexPolygon {
            vertices: self.hull.clone(),
        }
    }
}

/// Strict interior test for a counterclockwise convex polygon, by binary
/// search over the fan from its first vertex.
fn strictly_inside(v: &[Point2], p: Point2) -> bool {
    let n = v.len();
    if n < 3 {
        return false;
    }
    let o = v[0];
    if orient(o, v[1], p) <= 0.0 || orient(o, v[n - 1], p) >= 0.0 {
        return false;
    }
    // largest k with p left of o -> v[k]
    let (mut lo, mut hi) = (1, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if orient(o, v[mid], p) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    orient(v[lo], v[lo + 1], p) > 0.0
}
