//! Evaluable plane maps and the catalog of orientation-preserving
//! homeomorphisms used by the certification pipeline.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::geometry::Point2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("linear part has non-positive determinant {det}")]
    NotOrientationPreserving { det: f64 },
    #[error("invalid map parameter: {0}")]
    InvalidParameter(String),
}

/// A map evaluable at every point of the plane.
pub trait PlaneMap: Send + Sync {
    fn id(&self) -> String;
    fn apply(&self, p: Point2) -> Point2;
}

/// A plane homeomorphism with an evaluable inverse.
pub trait Homeomorphism: PlaneMap {
    fn apply_inverse(&self, p: Point2) -> Point2;

    /// Declared; see [`spot_check`].
    fn orientation_preserving(&self) -> bool {
        true
    }
}

impl<M: PlaneMap + ?Sized> PlaneMap for &M {
    fn id(&self) -> String {
        (**self).id()
    }
    fn apply(&self, p: Point2) -> Point2 {
        (**self).apply(p)
    }
}

impl<M: PlaneMap + ?Sized> PlaneMap for Arc<M> {
    fn id(&self) -> String {
        (**self).id()
    }
    fn apply(&self, p: Point2) -> Point2 {
        (**self).apply(p)
    }
}

impl<M: Homeomorphism + ?Sized> Homeomorphism for &M {
    fn apply_inverse(&self, p: Point2) -> Point2 {
        (**self).apply_inverse(p)
    }
    fn orientation_preserving(&self) -> bool {
        (**self).orientation_preserving()
    }
}

impl<M: Homeomorphism + ?Sized> Homeomorphism for Arc<M> {
    fn apply_inverse(&self, p: Point2) -> Point2 {
        (**self).apply_inverse(p)
    }
    fn orientation_preserving(&self) -> bool {
        (**self).orientation_preserving()
    }
}

/// Wraps a closure as a [`PlaneMap`]. Used for maps only defined along a curve.
pub struct FnMap<F> {
    id: String,
    f: F,
}

impl<F: Fn(Point2) -> Point2 + Send + Sync> FnMap<F> {
    pub fn new(id: impl Into<String>, f: F) -> Self {
        Self { id: id.into(), f }
    }
}

impl<F: Fn(Point2) -> Point2 + Send + Sync> PlaneMap for FnMap<F> {
    fn id(&self) -> String {
        self.id.clone()
    }
    fn apply(&self, p: Point2) -> Point2 {
        (self.f)(p)
    }
}

/// `p ↦ A p + b`.
#[derive(Clone, PartialEq)]
pub struct AffineMap {
    pub matrix: [[f64; 2]; 2],
    pub offset: Point2,
    id: String,
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineMap({})", self.id)
    }
}

impl AffineMap {
    /// Requires `det A > 0`.
    pub fn new(matrix: [[f64; 2]; 2], offset: Point2, id: impl Into<String>) -> Result<Self, MapError> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if !(det > 0.0) || !det.is_finite() {
            return Err(MapError::NotOrientationPreserving { det });
        }
        Ok(Self { matrix, offset, id: id.into() })
    }

    pub fn identity() -> Self {
        Self::new([[1.0, 0.0], [0.0, 1.0]], Point2::ORIGIN, "identity").unwrap()
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Self::new([[1.0, 0.0], [0.0, 1.0]], Point2::new(dx, dy), format!("trans:{dx}:{dy}")).unwrap()
    }

    /// Counter-clockwise rotation by `angle` radians about `center`.
    pub fn rotation(angle: f64, center: Point2) -> Self {
        let (s, c) = angle.sin_cos();
        let m = [[c, -s], [s, c]];
        let offset = center - mat_mul(m, center);
        Self::new(m, offset, format!("rot:{angle}:{}:{}", center.x, center.y)).unwrap()
    }

    pub fn half_turn(center: Point2) -> Self {
        // Exact -1 entries; sin(PI) is not exactly zero.
        let m = [[-1.0, 0.0], [0.0, -1.0]];
        let offset = center * 2.0;
        Self::new(m, offset, format!("pirot:{}:{}", center.x, center.y)).unwrap()
    }

    pub fn scaling(factor: f64, center: Point2) -> Result<Self, MapError> {
        if !(factor > 0.0) {
            return Err(MapError::InvalidParameter(format!("scale factor {factor} must be positive")));
        }
        let m = [[factor, 0.0], [0.0, factor]];
        let offset = center - mat_mul(m, center);
        Self::new(m, offset, format!("scale:{factor}:{}:{}", center.x, center.y))
    }

    pub fn linear(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MapError> {
        Self::new([[a, b], [c, d]], Point2::ORIGIN, format!("linear:{a}:{b}:{c}:{d}"))
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn det(&self) -> f64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    pub fn inverse(&self) -> AffineMap {
        let det = self.det();
        let [[a, b], [c, d]] = self.matrix;
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let offset = -mat_mul(inv, self.offset);
        AffineMap { matrix: inv, offset, id: format!("inv({})", self.id) }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let m = mat_mat(self.matrix, other.matrix);
        let offset = mat_mul(self.matrix, other.offset) + self.offset;
        AffineMap { matrix: m, offset, id: format!("{}∘{}", self.id, other.id) }
    }

    /// Unique fixed point, if `I - A` is invertible.
    pub fn fixed_point(&self) -> Option<Point2> {
        let [[a, b], [c, d]] = self.matrix;
        let (a, d) = (1.0 - a, 1.0 - d);
        let (b, c) = (-b, -c);
        let det = a * d - b * c;
        if det.abs() < 1e-14 {
            return None;
        }
        let (ex, ey) = (self.offset.x, self.offset.y);
        Some(Point2::new((d * ex - b * ey) / det, (a * ey - c * ex) / det))
    }

    /// Operator 2-norm of the linear part.
    pub fn linear_norm(&self) -> f64 {
        let [[a, b], [c, d]] = self.matrix;
        let t = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = (t * t - 4.0 * det * det).max(0.0).sqrt();
        ((t + disc) * 0.5).sqrt()
    }
}

fn mat_mul(m: [[f64; 2]; 2], p: Point2) -> Point2 {
    Point2 { x: m[0][0] * p.x + m[0][1] * p.y, y: m[1][0] * p.x + m[1][1] * p.y }
}

fn mat_mat(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

impl PlaneMap for AffineMap {
    fn id(&self) -> String {
        self.id.clone()
    }
    fn apply(&self, p: Point2) -> Point2 {
        mat_mul(self.matrix, p) + self.offset
    }
}

impl Homeomorphism for AffineMap {
    fn apply_inverse(&self, p: Point2) -> Point2 {
        let det = self.det();
        let [[a, b], [c, d]] = self.matrix;
        let q = p - self.offset;
        Point2 { x: (d * q.x - b * q.y) / det, y: (-c * q.x + a * q.y) / det }
    }
}

/// Vector field of the planar flows in the catalog.
pub type VectorField = fn(Point2) -> Point2;

/// `x' = x (1 - x²)`, `y' = -y` for `|x| ≤ 2`, continued linearly (C¹)
/// beyond so the flow is complete in both time directions.
pub fn bistable_field(p: Point2) -> Point2 {
    let fx = |x: f64| x * (1.0 - x * x);
    let x = p.x;
    let vx = if x > 2.0 {
        fx(2.0) - 11.0 * (x - 2.0)
    } else if x < -2.0 {
        fx(-2.0) - 11.0 * (x + 2.0)
    } else {
        fx(x)
    };
    Point2 { x: vx, y: -p.y }
}

/// Time-`t` map of a planar flow, integrated with fixed-step RK4.
///
/// The inverse integrates backwards with the same step, so
/// `inverse(forward(p))` differs from `p` by the RK4 round-trip error
/// (about `1e-12` for the bistable field near the unit square).
#[derive(Clone)]
pub struct FlowMap {
    field: VectorField,
    time: f64,
    steps: usize,
    id: String,
}

impl FlowMap {
    pub fn new(field: VectorField, time: f64, step: f64, id: impl Into<String>) -> Result<Self, MapError> {
        if !(step > 0.0) || !(time > 0.0) {
            return Err(MapError::InvalidParameter("flow time and step must be positive".into()));
        }
        let steps = (time / step).round().max(1.0) as usize;
        Ok(Self { field, time, steps, id: id.into() })
    }

    /// Time-1 map of [`bistable_field`] with step `1e-3`.
    pub fn bistable() -> Self {
        Self::new(bistable_field, 1.0, 1e-3, "flow:bistable").unwrap()
    }

    fn integrate(&self, mut p: Point2, dt: f64) -> Point2 {
        let f = self.field;
        for _ in 0..self.steps {
            let k1 = f(p);
            let k2 = f(p + k1 * (0.5 * dt));
            let k3 = f(p + k2 * (0.5 * dt));
            let k4 = f(p + k3 * dt);
            p = p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        }
        p
    }
}

impl PlaneMap for FlowMap {
    fn id(&self) -> String {
        self.id.clone()
    }
    fn apply(&self, p: Point2) -> Point2 {
        self.integrate(p, self.time / self.steps as f64)
    }
}

impl Homeomorphism for FlowMap {
    fn apply_inverse(&self, p: Point2) -> Point2 {
        self.integrate(p, -self.time / self.steps as f64)
    }
}

/// `(x, y) ↦ (x + s·y, y + s·ψ(x))` with `ψ(x) = sign(x)·max(0, |x| - a)`.
///
/// Fixes the segment `[-a, a] × {0}` pointwise and nothing else. For
/// `s < 1/√2` the displacement is a contraction-size perturbation of the
/// identity, hence a homeomorphism; the inverse is computed by fixed-point
/// iteration on `y`.
#[derive(Debug, Clone)]
pub struct SegmentShear {
    pub half_length: f64,
    pub strength: f64,
}

impl SegmentShear {
    pub fn new(half_length: f64, strength: f64) -> Result<Self, MapError> {
        if !(half_length >= 0.0) || !(strength > 0.0 && strength < 0.5) {
            return Err(MapError::InvalidParameter(format!(
                "shear needs half_length >= 0 and 0 < strength < 0.5, got {half_length}, {strength}"
            )));
        }
        Ok(Self { half_length, strength })
    }

    fn psi(&self, x: f64) -> f64 {
        x.signum() * (x.abs() - self.half_length).max(0.0)
    }
}

impl PlaneMap for SegmentShear {
    fn id(&self) -> String {
        format!("shear:{}:{}", self.half_length, self.strength)
    }
    fn apply(&self, p: Point2) -> Point2 {
        let s = self.strength;
        Point2 { x: p.x + s * p.y, y: p.y + s * self.psi(p.x) }
    }
}

impl Homeomorphism for SegmentShear {
    fn apply_inverse(&self, p: Point2) -> Point2 {
        let s = self.strength;
        let mut y = p.y;
        for _ in 0..200 {
            let next = p.y - s * self.psi(p.x - s * y);
            if next == y {
                break;
            }
            y = next;
        }
        Point2 { x: p.x - s * y, y }
    }
}

/// Homeomorphism mapping the square `center ± half` onto itself, written in
/// square-polar coordinates `(s, θ)` with `s = |p - center|_∞ / half`.
///
/// The angle moves by the circle map with multiplier `lambda` at `θ = π/2`
/// and `1/lambda` at `θ = -π/2`; outside the square `s - 1` is scaled by
/// `exp(k sin θ)`. On the frontier only the top and bottom midpoints are
/// fixed: the top one repels, the bottom one attracts, and the index along
/// a curve just outside the square is 2.
#[derive(Debug, Clone)]
pub struct SquareTwist {
    pub center: Point2,
    pub half: f64,
    pub lambda: f64,
    pub k: f64,
}

impl SquareTwist {
    pub fn new(center: Point2, half: f64, lambda: f64, k: f64) -> Result<Self, MapError> {
        if !(half > 0.0) || !(lambda > 0.0) || !k.is_finite() {
            return Err(MapError::InvalidParameter(format!(
                "twist needs half > 0, lambda > 0 and finite k, got {half}, {lambda}, {k}"
            )));
        }
        Ok(Self { center, half, lambda, k })
    }

    fn circle(&self, t: f64, lambda: f64) -> f64 {
        use std::f64::consts::FRAC_PI_2;
        FRAC_PI_2 + 2.0 * (lambda * ((t - FRAC_PI_2) / 2.0).tan()).atan()
    }

    fn polar(&self, p: Point2) -> (f64, f64) {
        let d = p - self.center;
        (d.x.abs().max(d.y.abs()) / self.half, d.y.atan2(d.x))
    }

    fn cartesian(&self, s: f64, t: f64) -> Point2 {
        let (c, sn) = (t.cos(), t.sin());
        let m = c.abs().max(sn.abs());
        self.center + Point2::new(c, sn) * (s * self.half / m)
    }
}

impl PlaneMap for SquareTwist {
    fn id(&self) -> String {
        format!("twist:{}:{}", self.lambda, self.k)
    }
    fn apply(&self, p: Point2) -> Point2 {
        let (s, t) = self.polar(p);
        if s == 0.0 {
            return p;
        }
        let s = if s > 1.0 { 1.0 + (s - 1.0) * (self.k * t.sin()).exp() } else { s };
        self.cartesian(s, self.circle(t, self.lambda))
    }
}

impl Homeomorphism for SquareTwist {
    fn apply_inverse(&self, p: Point2) -> Point2 {
        let (s, t) = self.polar(p);
        if s == 0.0 {
            return p;
        }
        let t = self.circle(t, 1.0 / self.lambda);
        let s = if s > 1.0 { 1.0 + (s - 1.0) * (-self.k * t.sin()).exp() } else { s };
        self.cartesian(s, t)
    }
}

/// Applies the parts in order: `parts[0]` first.
#[derive(Clone)]
pub struct Composition {
    parts: Vec<Arc<dyn Homeomorphism>>,
}

impl Composition {
    pub fn new(parts: Vec<Arc<dyn Homeomorphism>>) -> Result<Self, MapError> {
        if parts.is_empty() {
            return Err(MapError::InvalidParameter("empty composition".into()));
        }
        Ok(Self { parts })
    }
}

impl PlaneMap for Composition {
    fn id(&self) -> String {
        self.parts.iter().map(|p| p.id()).collect::<Vec<_>>().join(",")
    }
    fn apply(&self, p: Point2) -> Point2 {
        self.parts.iter().fold(p, |q, m| m.apply(q))
    }
}

impl Homeomorphism for Composition {
    fn apply_inverse(&self, p: Point2) -> Point2 {
        self.parts.iter().rev().fold(p, |q, m| m.apply_inverse(q))
    }
    fn orientation_preserving(&self) -> bool {
        self.parts.iter().all(|m| m.orientation_preserving())
    }
}

/// `h⁻¹` as a homeomorphism in its own right.
#[derive(Clone)]
pub struct Inverse<H>(pub H);

impl<H: Homeomorphism> PlaneMap for Inverse<H> {
    fn id(&self) -> String {
        format!("inv({})", self.0.id())
    }
    fn apply(&self, p: Point2) -> Point2 {
        self.0.apply_inverse(p)
    }
}

impl<H: Homeomorphism> Homeomorphism for Inverse<H> {
    fn apply_inverse(&self, p: Point2) -> Point2 {
        self.0.apply(p)
    }
    fn orientation_preserving(&self) -> bool {
        self.0.orientation_preserving()
    }
}

/// `g ∘ f ∘ g⁻¹` for an affine `g`.
pub struct Conjugate<'a, F: ?Sized> {
    pub f: &'a F,
    pub g: &'a AffineMap,
}

impl<F: PlaneMap + ?Sized> PlaneMap for Conjugate<'_, F> {
    fn id(&self) -> String {
        format!("{}∘{}∘{}⁻¹", self.g.id(), self.f.id(), self.g.id())
    }
    fn apply(&self, p: Point2) -> Point2 {
        self.g.apply(self.f.apply(self.g.apply_inverse(p)))
    }
}

/// Sampled sanity checks of a declared homeomorphism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapCheck {
    pub max_inverse_error: f64,
    pub min_jacobian_det: f64,
    pub samples: usize,
}

impl MapCheck {
    pub fn passes(&self, inverse_tol: f64) -> bool {
        self.max_inverse_error <= inverse_tol && self.min_jacobian_det > 0.0
    }
}

/// Evaluates `|h⁻¹(h(p)) - p|` and the central-difference Jacobian
/// determinant (step `1e-6`) at `samples` uniform points of the square
/// `center ± half_width`.
pub fn spot_check<H: Homeomorphism + ?Sized, R: Rng>(
    h: &H,
    rng: &mut R,
    center: Point2,
    half_width: f64,
    samples: usize,
) -> MapCheck {
    let step = 1e-6;
    let mut max_inverse_error: f64 = 0.0;
    let mut min_jacobian_det = f64::INFINITY;
    for _ in 0..samples {
        let p = Point2::new(
            center.x + rng.gen_range(-half_width..=half_width),
            center.y + rng.gen_range(-half_width..=half_width),
        );
        max_inverse_error = max_inverse_error.max(h.apply_inverse(h.apply(p)).dist(p));
        let dx = (h.apply(p + Point2::new(step, 0.0)) - h.apply(p - Point2::new(step, 0.0))) * (0.5 / step);
        let dy = (h.apply(p + Point2::new(0.0, step)) - h.apply(p - Point2::new(0.0, step))) * (0.5 / step);
        min_jacobian_det = min_jacobian_det.min(dx.cross(dy));
    }
    MapCheck { max_inverse_error, min_jacobian_det, samples }
}

/// Parses an angle such as `1`, `-0.7`, `pi`, `pi/2`, `2pi/3`, `-pi/4`.
pub fn parse_angle(s: &str) -> Result<f64, MapError> {
    let s = s.trim();
    let bad = || MapError::InvalidParameter(format!("cannot parse angle {s:?}"));
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let (coef, rest) = s.split_at(pos);
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &rest[2..];
    let denom = if rest.is_empty() {
        1.0
    } else {
        rest.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?
    };
    if denom == 0.0 {
        return Err(bad());
    }
    Ok(coef * PI / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn twist_preserves_square() {
        let h = SquareTwist::new(Point2::ORIGIN, 0.625, 3.0, 1.0).unwrap();
        let top = Point2::new(0.0, 0.625);
        assert!(h.apply(top).dist(top) < 1e-12);
        // Frontier points stay on the frontier, and nothing else there is fixed.
        for i in 0..64 {
            let t = i as f64 / 64.0 * std::f64::consts::TAU + 0.01;
            let p = h.cartesian(1.0, t);
            let q = h.apply(p);
            assert!((h.polar(q).0 - 1.0).abs() < 1e-12);
            assert!(q.dist(p) > 1e-3);
            assert!(h.apply_inverse(q).dist(p) < 1e-12);
        }
        let out = Point2::new(0.1, 1.0);
        assert!(h.apply_inverse(h.apply(out)).dist(out) < 1e-12);
    }

    #[test]
    fn affine_inverse_and_fixed_point() {
        let r = AffineMap::rotation(1.0, Point2::new(0.25, -0.5));
        let fp = r.fixed_point().unwrap();
        assert!(fp.dist(Point2::new(0.25, -0.5)) < 1e-12);
        let p = Point2::new(3.0, 1.0);
        assert!(r.apply_inverse(r.apply(p)).dist(p) < 1e-12);
        assert!(AffineMap::linear(1.0, 0.0, 0.0, -1.0).is_err());
        assert!(AffineMap::translation(1.0, 0.0).fixed_point().is_none());
    }

    #[test]
    fn half_turn_is_exact() {
        let h = AffineMap::half_turn(Point2::new(0.25, 0.25));
        assert_eq!(h.apply(Point2::new(1.0, 0.0)), Point2::new(-0.5, 0.5));
        assert_eq!(h.fixed_point(), Some(Point2::new(0.25, 0.25)));
    }

    #[test]
    fn catalog_spot_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let maps: Vec<Box<dyn Homeomorphism>> = vec![
            Box::new(AffineMap::rotation(0.7, Point2::new(1.0, 1.0))),
            Box::new(AffineMap::linear(2.0, 0.0, 0.0, 0.5).unwrap()),
            Box::new(FlowMap::bistable()),
            Box::new(SegmentShear::new(1.5, 0.1).unwrap()),
        ];
        for h in &maps {
            let check = spot_check(h.as_ref(), &mut rng, Point2::ORIGIN, 1.6, 100);
            assert!(check.passes(1e-9), "{}: {check:?}", h.id());
        }
    }

    #[test]
    fn bistable_flow_equilibria_are_exact() {
        let h = FlowMap::bistable();
        for x in [-1.0, 0.0, 1.0] {
            assert_eq!(h.apply(Point2::new(x, 0.0)), Point2::new(x, 0.0));
        }
        let p = h.apply(Point2::new(0.5, 0.5));
        assert!(p.x > 0.5 && p.x < 1.0 && (p.y - 0.5 * (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn shear_fixes_segment_only() {
        let h = SegmentShear::new(1.5, 0.1).unwrap();
        assert_eq!(h.apply(Point2::new(1.2, 0.0)), Point2::new(1.2, 0.0));
        assert_ne!(h.apply(Point2::new(1.6, 0.0)), Point2::new(1.6, 0.0));
        assert_ne!(h.apply(Point2::new(0.0, 0.1)), Point2::new(0.0, 0.1));
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("0.7").unwrap(), 0.7);
        assert!(parse_angle("pie").is_err());
    }
}
