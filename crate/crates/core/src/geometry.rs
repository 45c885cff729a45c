//! Plane geometry kernel: points, segments, polygonal curves and the
//! predicates the rest of the crate is built on.
//!
//! Coordinates are `f64`. Grid-derived coordinates are dyadic rationals
//! `k / 2^m` and are produced exactly by [`dyadic`]. Boundary fuzz is a single
//! tolerance (`on_tol`, default [`DEFAULT_ON_TOL`]) passed explicitly to the
//! predicates that need it.

use std::collections::HashMap;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default on-boundary tolerance.
pub const DEFAULT_ON_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("non-finite coordinate ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("curve needs at least {needed} vertices, got {got}")]
    TooFewVertices { needed: usize, got: usize },
    #[error("consecutive vertices {index} and {next} coincide")]
    RepeatedVertex { index: usize, next: usize },
    #[error("curve is degenerate (signed area {area:e})")]
    DegenerateCurve { area: f64 },
    #[error("operation requires a closed curve")]
    NotClosed,
    #[error("curve is not simple: segments {first} and {second} meet")]
    NotSimple { first: usize, second: usize },
}

/// A point (or displacement vector) of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    /// Panics on non-finite input; use [`Point2::try_new`] for untrusted data.
    pub fn new(x: f64, y: f64) -> Self {
        Self::try_new(x, y).expect("Point2 coordinates must be finite")
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(GeometryError::NonFinite { x, y })
        }
    }

    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2 {
            x: self.x + (other.x - self.x) * t,
            y: self.y + (other.y - self.y) * t,
        }
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2 {
            x: 0.5 * (self.x + other.x),
            y: 0.5 * (self.y + other.y),
        }
    }

    /// Lexicographic comparison on (x, y).
    pub fn lex_cmp(&self, other: &Point2) -> std::cmp::Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2 { x: self.x + rhs.x, y: self.y + rhs.y }
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2 { x: self.x - rhs.x, y: self.y - rhs.y }
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2 { x: self.x * rhs, y: self.y * rhs }
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2 { x: -self.x, y: -self.y }
    }
}

/// Exact dyadic coordinate `k / 2^exp`.
///
/// Exact as long as `|k| < 2^53`; the grid code keeps `|k| < 2^28`.
pub fn dyadic(k: i64, exp: u32) -> f64 {
    debug_assert!(k.unsigned_abs() < (1u64 << 53));
    k as f64 / (1u64 << exp) as f64
}

/// Twice the signed area of triangle `abc`; positive when counter-clockwise.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// Closest point of the segment to `p`.
    pub fn closest_point(&self, p: Point2) -> Point2 {
        let d = self.b - self.a;
        let len_sq = d.norm_sq();
        if len_sq == 0.0 {
            return self.a;
        }
        let t = ((p - self.a).dot(d) / len_sq).clamp(0.0, 1.0);
        self.a.lerp(self.b, t)
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        self.closest_point(p).dist(p)
    }

    fn bbox_distance(&self, other: &Segment) -> f64 {
        let (ax0, ax1) = minmax(self.a.x, self.b.x);
        let (ay0, ay1) = minmax(self.a.y, self.b.y);
        let (bx0, bx1) = minmax(other.a.x, other.b.x);
        let (by0, by1) = minmax(other.a.y, other.b.y);
        let dx = (bx0 - ax1).max(ax0 - bx1).max(0.0);
        let dy = (by0 - ay1).max(ay0 - by1).max(0.0);
        dx.max(dy)
    }
}

fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Outcome of [`segments_intersect`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Intersection {
    Disjoint,
    Point(Point2),
    Overlap,
}

/// Classifies the intersection of two closed segments under tolerance `tol`.
///
/// Segments closer than `tol` are treated as touching. Collinear segments
/// (every endpoint within `tol` of the other's supporting line) sharing more
/// than `tol` of length resolve to [`Intersection::Overlap`]. Degenerate
/// (zero-length) segments are accepted and behave as points.
///
/// The result is symmetric in its arguments: the pair is put in a canonical
/// order before any arithmetic happens.
pub fn segments_intersect(s1: &Segment, s2: &Segment, tol: f64) -> Intersection {
    let (s1, s2) = canonical_pair(s1, s2);
    if s1.bbox_distance(&s2) > tol {
        return Intersection::Disjoint;
    }
    let gap = segment_distance(&s1, &s2);
    if gap > tol {
        return Intersection::Disjoint;
    }

    let len1 = s1.length();
    let len2 = s2.length();
    if len1 <= tol || len2 <= tol {
        // At least one is (nearly) a point.
        let p = if len1 <= len2 { s1.a.midpoint(s1.b) } else { s2.a.midpoint(s2.b) };
        let other = if len1 <= len2 { &s2 } else { &s1 };
        return Intersection::Point(other.closest_point(p).midpoint(p));
    }

    let collinear = line_distance(&s1, s2.a) <= tol
        && line_distance(&s1, s2.b) <= tol
        && line_distance(&s2, s1.a) <= tol
        && line_distance(&s2, s1.b) <= tol;
    if collinear {
        let dir = (s1.b - s1.a) * (1.0 / len1);
        let proj = |p: Point2| (p - s1.a).dot(dir);
        let (lo2, hi2) = minmax(proj(s2.a), proj(s2.b));
        let lo = lo2.max(0.0);
        let hi = hi2.min(len1);
        if hi - lo > tol {
            return Intersection::Overlap;
        }
        let t = 0.5 * (lo + hi);
        return Intersection::Point(s1.a + dir * t);
    }

    let d1 = s1.b - s1.a;
    let d2 = s2.b - s2.a;
    let denom = d1.cross(d2);
    let t = (s2.a - s1.a).cross(d2) / denom;
    if denom != 0.0 && (0.0..=1.0).contains(&t) {
        let u = (s2.a - s1.a).cross(d1) / denom;
        if (0.0..=1.0).contains(&u) {
            return Intersection::Point(s1.a.lerp(s1.b, t));
        }
    }
    // Touching within tolerance without a proper crossing: witness is the
    // midpoint of the closest pair.
    let (p, q) = closest_pair(&s1, &s2);
    Intersection::Point(p.midpoint(q))
}

fn canonical_pair(s1: &Segment, s2: &Segment) -> (Segment, Segment) {
    let norm = |s: &Segment| {
        if s.a.lex_cmp(&s.b).is_le() {
            *s
        } else {
            Segment::new(s.b, s.a)
        }
    };
    let (a, b) = (norm(s1), norm(s2));
    let key = |s: &Segment| (s.a, s.b);
    let (ka, kb) = (key(&a), key(&b));
    let ord = ka.0.lex_cmp(&kb.0).then_with(|| ka.1.lex_cmp(&kb.1));
    if ord.is_le() {
        (a, b)
    } else {
        (b, a)
    }
}

fn line_distance(s: &Segment, p: Point2) -> f64 {
    let d = s.b - s.a;
    let len = d.norm();
    if len == 0.0 {
        return p.dist(s.a);
    }
    (d.cross(p - s.a) / len).abs()
}

fn closest_pair(s1: &Segment, s2: &Segment) -> (Point2, Point2) {
    let candidates = [
        (s1.a, s2.closest_point(s1.a)),
        (s1.b, s2.closest_point(s1.b)),
        (s1.closest_point(s2.a), s2.a),
        (s1.closest_point(s2.b), s2.b),
    ];
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if c.0.dist(c.1) < best.0.dist(best.1) {
            best = *c;
        }
    }
    best
}

/// Euclidean distance between two closed segments.
pub fn segment_distance(s1: &Segment, s2: &Segment) -> f64 {
    let d1 = s1.b - s1.a;
    let d2 = s2.b - s2.a;
    let denom = d1.cross(d2);
    if denom != 0.0 {
        let t = (s2.a - s1.a).cross(d2) / denom;
        let u = (s2.a - s1.a).cross(d1) / denom;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            return 0.0;
        }
    }
    let (p, q) = closest_pair(s1, s2);
    p.dist(q)
}

/// Which way a closed curve goes around its interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// Interior on the left (counter-clockwise).
    Positive,
    Negative,
}

impl Orientation {
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// Result of [`point_in_polygon`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Containment {
    Inside,
    Outside,
    OnBoundary,
}

/// An ordered polygonal curve, either an open arc or a closed curve.
///
/// Closed curves store each vertex once; the closing edge from the last
/// vertex back to the first is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCurve {
    vertices: Vec<Point2>,
    closed: bool,
}

impl PolyCurve {
    pub fn open(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        Self::build(vertices, false)
    }

    /// A repeated first vertex at the end of the list is dropped.
    pub fn closed(mut vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        Self::build(vertices, true)
    }

    fn build(vertices: Vec<Point2>, closed: bool) -> Result<Self, GeometryError> {
        let needed = if closed { 3 } else { 2 };
        if vertices.len() < needed {
            return Err(GeometryError::TooFewVertices { needed, got: vertices.len() });
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite { x: p.x, y: p.y });
        }
        let n = vertices.len();
        let edges = if closed { n } else { n - 1 };
        for i in 0..edges {
            let j = (i + 1) % n;
            if vertices[i] == vertices[j] {
                return Err(GeometryError::RepeatedVertex { index: i, next: j });
            }
        }
        Ok(Self { vertices, closed })
    }

    /// Regular `n`-gon inscribed in the circle of radius `r` about `center`,
    /// counter-clockwise, first vertex at angle 0.
    pub fn circle(center: Point2, r: f64, n: usize) -> Result<Self, GeometryError> {
        let vertices = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                Point2::new(center.x + r * a.cos(), center.y + r * a.sin())
            })
            .collect();
        Self::closed(vertices)
    }

    /// Counter-clockwise boundary of the axis-aligned rectangle.
    pub fn rectangle(lo: Point2, hi: Point2) -> Result<Self, GeometryError> {
        Self::closed(vec![lo, Point2::new(hi.x, lo.y), hi, Point2::new(lo.x, hi.y)])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    pub fn segment(&self, i: usize) -> Segment {
        let n = self.vertices.len();
        Segment::new(self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.segment_count()).map(|i| self.segment(i))
    }

    pub fn start(&self) -> Point2 {
        self.vertices[0]
    }

    /// Last point of the traversal; the start again for closed curves.
    pub fn end(&self) -> Point2 {
        if self.closed {
            self.vertices[0]
        } else {
            *self.vertices.last().unwrap()
        }
    }

    pub fn reversed(&self) -> PolyCurve {
        let mut vertices = self.vertices.clone();
        if self.closed {
            // Keep the same starting vertex.
            vertices[1..].reverse();
        } else {
            vertices.reverse();
        }
        PolyCurve { vertices, closed: self.closed }
    }

    /// Closed curve only: same cycle starting at vertex `k`.
    pub fn rotated(&self, k: usize) -> PolyCurve {
        let mut vertices = self.vertices.clone();
        vertices.rotate_left(k % self.vertices.len());
        PolyCurve { vertices, closed: self.closed }
    }

    /// Applies `f` to every vertex. Fails if the images are degenerate.
    pub fn map_vertices(&self, f: impl Fn(Point2) -> Point2) -> Result<PolyCurve, GeometryError> {
        Self::build(self.vertices.iter().map(|&p| f(p)).collect(), self.closed)
    }

    /// Inserts `k - 1` evenly spaced collinear points inside every segment.
    pub fn subdivided(&self, k: usize) -> PolyCurve {
        let k = k.max(1);
        let mut out = Vec::with_capacity(self.segment_count() * k + 1);
        for s in self.segments() {
            for j in 0..k {
                out.push(s.a.lerp(s.b, j as f64 / k as f64));
            }
        }
        if !self.closed {
            out.push(self.end());
        }
        PolyCurve { vertices: out, closed: self.closed }
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|s| s.length()).sum()
    }

    /// Twice the signed (shoelace) area; only meaningful for closed curves.
    pub fn twice_signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let o = self.vertices[0];
        (0..n)
            .map(|i| (self.vertices[i] - o).cross(self.vertices[(i + 1) % n] - o))
            .sum()
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        self.segments().map(|s| s.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// Point at arc-length fraction `t` in `[0, 1]` of the traversal.
    pub fn point_at_fraction(&self, t: f64) -> Point2 {
        let total = self.length();
        let mut target = t.clamp(0.0, 1.0) * total;
        for s in self.segments() {
            let l = s.length();
            if target <= l {
                return s.a.lerp(s.b, if l > 0.0 { target / l } else { 0.0 });
            }
            target -= l;
        }
        self.end()
    }

    /// Stable identifier derived from the vertex bit patterns.
    pub fn fingerprint(&self) -> String {
        let mut h = DefaultHasher::new();
        self.closed.hash(&mut h);
        for p in &self.vertices {
            p.x.to_bits().hash(&mut h);
            p.y.to_bits().hash(&mut h);
        }
        format!(
            "{}{}-{:016x}",
            if self.closed { "closed" } else { "open" },
            self.vertices.len(),
            h.finish()
        )
    }

    /// Pairwise test of non-adjacent segments, bucketed on a uniform grid.
    pub fn check_simple(&self, tol: f64) -> Result<(), GeometryError> {
        let m = self.segment_count();
        if m < 3 {
            return Ok(());
        }
        let (lo, hi) = self.bbox();
        let avg = (self.length() / m as f64).max(tol).max(f64::MIN_POSITIVE);
        let cell = avg * 2.0;
        let key = |x: f64, y: f64| {
            (((x - lo.x) / cell).floor() as i64, ((y - lo.y) / cell).floor() as i64)
        };
        let _ = hi;
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for i in 0..m {
            let s = self.segment(i);
            let (x0, x1) = minmax(s.a.x, s.b.x);
            let (y0, y1) = minmax(s.a.y, s.b.y);
            let (kx0, ky0) = key(x0 - tol, y0 - tol);
            let (kx1, ky1) = key(x1 + tol, y1 + tol);
            for kx in kx0..=kx1 {
                for ky in ky0..=ky1 {
                    buckets.entry((kx, ky)).or_default().push(i);
                }
            }
        }
        let adjacent = |i: usize, j: usize| {
            let d = i.abs_diff(j);
            d == 1 || (self.closed && d == m - 1)
        };
        let mut keys: Vec<_> = buckets.keys().copied().collect();
        keys.sort_unstable();
        for k in keys {
            let list = &buckets[&k];
            for (a, &i) in list.iter().enumerate() {
                for &j in &list[a + 1..] {
                    let (si, sj) = (self.segment(i), self.segment(j));
                    if adjacent(i, j) {
                        // Adjacent segments may only share their common vertex.
                        if let Intersection::Overlap = segments_intersect(&si, &sj, tol) {
                            return Err(GeometryError::NotSimple { first: i.min(j), second: i.max(j) });
                        }
                        continue;
                    }
                    if segments_intersect(&si, &sj, tol) != Intersection::Disjoint {
                        return Err(GeometryError::NotSimple { first: i.min(j), second: i.max(j) });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_simple(&self, tol: f64) -> bool {
        self.check_simple(tol).is_ok()
    }
}

/// Crossing-number parity of `p` against a closed vertex ring. Works for
/// weakly simple rings; `p` must not lie on the ring.
pub fn crossing_parity(p: Point2, ring: &[Point2]) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn require_closed_nondegenerate(c: &PolyCurve, tol: f64) -> Result<f64, GeometryError> {
    if !c.is_closed() {
        return Err(GeometryError::NotClosed);
    }
    let area2 = c.twice_signed_area();
    if area2.abs() * 0.5 <= tol * c.length() {
        return Err(GeometryError::DegenerateCurve { area: area2 * 0.5 });
    }
    Ok(area2)
}

/// Locates `p` relative to a closed simple curve.
pub fn point_in_polygon(p: Point2, c: &PolyCurve, on_tol: f64) -> Result<Containment, GeometryError> {
    require_closed_nondegenerate(c, on_tol)?;
    if c.distance_to(p) <= on_tol {
        return Ok(Containment::OnBoundary);
    }
    Ok(if crossing_parity(p, c.vertices()) {
        Containment::Inside
    } else {
        Containment::Outside
    })
}

/// Orientation of a closed simple curve from the sign of its shoelace area.
pub fn curve_orientation(c: &PolyCurve, tol: f64) -> Result<Orientation, GeometryError> {
    let area2 = require_closed_nondegenerate(c, tol)?;
    Ok(if area2 > 0.0 {
        Orientation::Positive
    } else {
        Orientation::Negative
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn unit_square() -> PolyCurve {
        PolyCurve::rectangle(p(-0.5, -0.5), p(0.5, 0.5)).unwrap()
    }

    #[test]
    fn point_in_unit_square() {
        let sq = unit_square();
        assert_eq!(point_in_polygon(p(0.0, 0.0), &sq, 1e-9), Ok(Containment::Inside));
        assert_eq!(point_in_polygon(p(2.0, 0.0), &sq, 1e-9), Ok(Containment::Outside));
        assert_eq!(
            point_in_polygon(p(0.25, 0.5 + 1e-12), &sq, 1e-9),
            Ok(Containment::OnBoundary)
        );
        assert_eq!(
            point_in_polygon(p(0.5, 0.5 + 1e-12), &sq, 1e-9),
            Ok(Containment::OnBoundary)
        );
    }

    #[test]
    fn degenerate_and_open_curves_are_rejected() {
        let flat = PolyCurve::closed(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)]).unwrap();
        assert!(matches!(
            point_in_polygon(p(0.0, 1.0), &flat, 1e-9),
            Err(GeometryError::DegenerateCurve { .. })
        ));
        let arc = PolyCurve::open(vec![p(0.0, 0.0), p(1.0, 0.0)]).unwrap();
        assert_eq!(curve_orientation(&arc, 1e-9), Err(GeometryError::NotClosed));
    }

    #[test]
    fn orientation_of_square() {
        let ccw = unit_square();
        assert_eq!(curve_orientation(&ccw, 1e-9), Ok(Orientation::Positive));
        assert_eq!(curve_orientation(&ccw.reversed(), 1e-9), Ok(Orientation::Negative));
    }

    #[test]
    fn constructors_validate() {
        assert!(Point2::try_new(f64::NAN, 0.0).is_err());
        assert!(matches!(
            PolyCurve::open(vec![p(0.0, 0.0), p(0.0, 0.0)]),
            Err(GeometryError::RepeatedVertex { .. })
        ));
        assert!(matches!(
            PolyCurve::closed(vec![p(0.0, 0.0), p(1.0, 0.0)]),
            Err(GeometryError::TooFewVertices { .. })
        ));
        // Trailing copy of the first vertex is folded into the implicit closure.
        let c = PolyCurve::closed(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.0, 0.0)]).unwrap();
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn segment_cases() {
        let s = |a: (f64, f64), b: (f64, f64)| Segment::new(p(a.0, a.1), p(b.0, b.1));
        assert_eq!(
            segments_intersect(&s((0.0, 0.0), (1.0, 0.0)), &s((0.0, 1.0), (1.0, 1.0)), 1e-9),
            Intersection::Disjoint
        );
        assert_eq!(
            segments_intersect(&s((0.0, 0.0), (1.0, 1.0)), &s((1.0, 0.0), (0.0, 1.0)), 1e-9),
            Intersection::Point(p(0.5, 0.5))
        );
        assert_eq!(
            segments_intersect(&s((0.0, 0.0), (2.0, 0.0)), &s((1.0, 0.0), (3.0, 0.0)), 1e-9),
            Intersection::Overlap
        );
        // End-to-end touch of collinear segments is a single point.
        assert_eq!(
            segments_intersect(&s((0.0, 0.0), (1.0, 0.0)), &s((1.0, 0.0), (2.0, 0.0)), 1e-9),
            Intersection::Point(p(1.0, 0.0))
        );
        // Nearly collinear within tolerance resolves to overlap.
        assert_eq!(
            segments_intersect(&s((0.0, 0.0), (2.0, 0.0)), &s((1.0, 1e-12), (3.0, -1e-12)), 1e-9),
            Intersection::Overlap
        );
        // T-junction.
        assert_eq!(
            segments_intersect(&s((0.0, 0.0), (2.0, 0.0)), &s((1.0, 0.0), (1.0, 1.0)), 1e-9),
            Intersection::Point(p(1.0, 0.0))
        );
    }

    #[test]
    fn simplicity() {
        assert!(unit_square().is_simple(1e-9));
        let bowtie = PolyCurve::closed(vec![p(0.0, 0.0), p(1.0, 1.0), p(1.0, 0.0), p(0.0, 1.0)]).unwrap();
        assert!(!bowtie.is_simple(1e-9));
        let circle = PolyCurve::circle(Point2::ORIGIN, 1.0, 200).unwrap();
        assert!(circle.is_simple(1e-9));
    }

    #[test]
    fn dyadics_are_exact() {
        assert_eq!(dyadic(3, 2), 0.75);
        assert_eq!(dyadic(-(1 << 27) + 1, 24), ((-(1i64 << 27) + 1) as f64) / 16777216.0);
    }

    #[test]
    fn reversal_keeps_start_of_closed_curve() {
        let c = unit_square();
        let r = c.reversed();
        assert_eq!(r.start(), c.start());
        assert_eq!(r.reversed(), c);
    }
}
