//! Index of a fixed-point-free map along a polygonal curve.
//!
//! The index `i(f, α)` is the net number of turns made by the displacement
//! `f(α(t)) - α(t)` as `t` runs over the curve. It is computed by lifting the
//! displacement angle continuously: the curve's vertices (plus an initial
//! uniform budget) are sampled, and any parameter interval whose raw angle
//! gap reaches `max_gap` is bisected until every gap is below it. Each
//! interval then contributes its principal angle difference.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Point2, PolyCurve};
use crate::maps::{AffineMap, Conjugate, FnMap, PlaneMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("map has a fixed point on the curve at t = {t} near {point} (|f(p) - p| = {displacement:e})")]
    FixedPointOnCurve { t: f64, point: Point2, displacement: f64 },
    #[error("angle lifting needed more than {budget} samples")]
    RefinementExhausted { budget: usize },
    #[error("closed-curve index {turns} is not within {tol:e} of an integer")]
    NonIntegral { turns: f64, tol: f64 },
    #[error("endpoint images differ: f = {f}, g = {g}")]
    EndpointMismatch { f: Point2, g: Point2 },
    #[error("map is not orientation preserving")]
    NotOrientationPreserving,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexConfig {
    /// Displacements at or below this magnitude count as fixed points.
    pub fix_tol: f64,
    /// Snapping band around integers for closed curves.
    pub int_tol: f64,
    /// Hard cap on evaluated samples.
    pub max_samples: usize,
    /// Minimum number of samples spread over the curve by arc length.
    pub initial_samples: usize,
    /// Raw angle gap that forces a bisection.
    pub max_gap: f64,
    /// Tolerance for matching endpoint images in arc comparisons.
    pub on_tol: f64,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            fix_tol: 1e-9,
            int_tol: 1e-6,
            max_samples: 1 << 20,
            initial_samples: 256,
            max_gap: FRAC_PI_2,
            on_tol: crate::geometry::DEFAULT_ON_TOL,
        }
    }
}

/// One sample of the lifted displacement field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSample {
    /// Curve parameter in `[0, 1]`; segment `i` of `n` covers `[i/n, (i+1)/n]`.
    pub t: f64,
    pub base: Point2,
    pub tip: Point2,
    /// Lifted angle in radians, cumulative from the first sample.
    pub angle: f64,
}

/// Index value in full turns. `snapped` is set for closed curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexValue {
    pub turns: f64,
    pub snapped: Option<i64>,
}

impl IndexValue {
    /// The integer index of a closed curve.
    pub fn integer(&self) -> Option<i64> {
        self.snapped
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexCertificate {
    pub index: IndexValue,
    pub samples_used: usize,
    pub min_displacement: f64,
    pub curve_id: String,
    pub map_id: String,
}

impl IndexCertificate {
    /// Integer index; `0` is never returned for an open arc, which has none.
    pub fn integer(&self) -> Option<i64> {
        self.index.snapped
    }
}

/// Full output of the angle lifting.
#[derive(Debug, Clone)]
pub struct Lift {
    pub samples: Vec<DisplacementSample>,
    pub min_displacement: f64,
}

impl Lift {
    pub fn turns(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => (b.angle - a.angle) / TAU,
            _ => 0.0,
        }
    }
}

/// Signed angle from `a` to `b` in `(-π, π]`.
fn angle_between(a: Point2, b: Point2) -> f64 {
    a.cross(b).atan2(a.dot(b))
}

struct Sampler<'a, F: ?Sized> {
    f: &'a F,
    cfg: &'a IndexConfig,
    evaluated: usize,
    min_displacement: f64,
}

impl<F: PlaneMap + ?Sized> Sampler<'_, F> {
    fn eval(&mut self, t: f64, base: Point2) -> Result<(Point2, Point2), IndexError> {
        self.evaluated += 1;
        if self.evaluated > self.cfg.max_samples {
            return Err(IndexError::RefinementExhausted { budget: self.cfg.max_samples });
        }
        let tip = self.f.apply(base);
        let d = tip - base;
        let mag = d.norm();
        if !(mag > self.cfg.fix_tol) {
            return Err(IndexError::FixedPointOnCurve { t, point: base, displacement: mag });
        }
        self.min_displacement = self.min_displacement.min(mag);
        Ok((tip, d))
    }
}

/// Lifts the displacement angle of `f` along `alpha`.
pub fn lift<F: PlaneMap + ?Sized>(f: &F, alpha: &PolyCurve, cfg: &IndexConfig) -> Result<Lift, IndexError> {
    let nseg = alpha.segment_count();
    let total_len = alpha.length();
    let mut sampler = Sampler { f, cfg, evaluated: 0, min_displacement: f64::INFINITY };

    let first = alpha.start();
    let (first_tip, first_d) = sampler.eval(0.0, first)?;
    let mut samples = Vec::with_capacity(cfg.initial_samples.max(nseg) + 1);
    samples.push(DisplacementSample { t: 0.0, base: first, tip: first_tip, angle: 0.0 });
    let mut angle = 0.0;
    let mut d0 = first_d;
    let mut stack: Vec<(f64, f64, Point2, Point2)> = Vec::new();

    for i in 0..nseg {
        let seg = alpha.segment(i);
        let pieces = if total_len > 0.0 {
            ((cfg.initial_samples as f64) * seg.length() / total_len).ceil().max(1.0) as usize
        } else {
            1
        };
        let param = |s: f64| if i + 1 == nseg && s == 1.0 { 1.0 } else { (i as f64 + s) / nseg as f64 };
        let mut s0 = 0.0;
        for j in 1..=pieces {
            let s1 = j as f64 / pieces as f64;
            let d1 = if j == pieces && i + 1 == nseg && alpha.is_closed() {
                // Closing vertex: reuse the first evaluation.
                first_d
            } else {
                let base = if j == pieces { seg.b } else { seg.a.lerp(seg.b, s1) };
                sampler.eval(param(s1), base)?.1
            };
            // Bisect [s0, s1] until every raw gap is below max_gap; the stack
            // pops left intervals first so samples stay in curve order.
            stack.clear();
            stack.push((s0, s1, d0, d1));
            while let Some((a, b, da, db)) = stack.pop() {
                let gap = angle_between(da, db);
                if gap.abs() >= cfg.max_gap {
                    let mid = 0.5 * (a + b);
                    let (_, dm) = sampler.eval(param(mid), seg.a.lerp(seg.b, mid))?;
                    stack.push((mid, b, dm, db));
                    stack.push((a, mid, da, dm));
                } else {
                    angle += gap;
                    let base = if b == 1.0 { seg.b } else { seg.a.lerp(seg.b, b) };
                    samples.push(DisplacementSample { t: param(b), base, tip: base + db, angle });
                }
            }
            s0 = s1;
            d0 = d1;
        }
    }

    Ok(Lift { samples, min_displacement: sampler.min_displacement })
}

/// Computes `i(f, α)` with a certificate of how it was obtained.
pub fn index_along<F: PlaneMap + ?Sized>(
    f: &F,
    alpha: &PolyCurve,
    cfg: &IndexConfig,
) -> Result<IndexCertificate, IndexError> {
    let lifted = lift(f, alpha, cfg)?;
    let turns = lifted.turns();
    let snapped = if alpha.is_closed() {
        let k = turns.round();
        if (turns - k).abs() > cfg.int_tol {
            return Err(IndexError::NonIntegral { turns, tol: cfg.int_tol });
        }
        Some(k as i64)
    } else {
        None
    };
    Ok(IndexCertificate {
        index: IndexValue { turns, snapped },
        samples_used: lifted.samples.len(),
        min_displacement: lifted.min_displacement,
        curve_id: alpha.fingerprint(),
        map_id: f.id(),
    })
}

/// `i(f, α⁻¹) = -i(f, α)` after snapping (closed) or within `int_tol` (arcs).
pub fn index_reverse_check<F: PlaneMap + ?Sized>(
    f: &F,
    alpha: &PolyCurve,
    cfg: &IndexConfig,
) -> Result<bool, IndexError> {
    let fwd = index_along(f, alpha, cfg)?;
    let rev = index_along(f, &alpha.reversed(), cfg)?;
    Ok(match (fwd.index.snapped, rev.index.snapped) {
        (Some(a), Some(b)) => a + b == 0,
        _ => (fwd.index.turns + rev.index.turns).abs() <= cfg.int_tol,
    })
}

/// `i(g f g⁻¹, g(c)) = i(f, c)` for an orientation-preserving affine `g`.
pub fn conjugation_invariance_check<F: PlaneMap + ?Sized>(
    f: &F,
    g: &AffineMap,
    c: &PolyCurve,
    cfg: &IndexConfig,
) -> Result<bool, IndexError> {
    if !c.is_closed() {
        return Err(GeometryError::NotClosed.into());
    }
    if !(g.det() > 0.0) {
        return Err(IndexError::NotOrientationPreserving);
    }
    let direct = index_along(f, c, cfg)?;
    let gc = c.map_vertices(|p| g.apply(p))?;
    let conj = Conjugate { f, g };
    let moved = index_along(&conj, &gc, cfg)?;
    Ok(direct.index.snapped == moved.index.snapped)
}

/// Geometric hypothesis the caller asserts for [`arc_index_difference`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcConfig {
    /// Both images avoid the arc and a half-line from one endpoint.
    HalfLineAvoidance,
    /// The two images form a positively oriented Jordan curve around the arc.
    JordanEnclosure,
    /// The arc lies on a positive Jordan curve, `f` maps inside, `g`
    /// outside, and the arc sits inside the stretch of the curve running
    /// from the shared image of its start to that of its end. (With both
    /// shared images inside the arc instead, the difference is `+1`.)
    InteriorExteriorSplit,
}

impl ArcConfig {
    /// The difference `i(f, α) - i(g, α)` the hypothesis implies.
    pub fn predicted(self) -> i64 {
        match self {
            ArcConfig::HalfLineAvoidance => 0,
            ArcConfig::JordanEnclosure => 1,
            ArcConfig::InteriorExteriorSplit => -1,
        }
    }
}

/// `i(f, α) - i(g, α)` for maps agreeing at the endpoints of an open arc.
///
/// The configuration is recorded by the caller but not verified here; see
/// [`check_jordan_enclosure`] for a best-effort check of the enclosure case.
pub fn arc_index_difference<F: PlaneMap + ?Sized, G: PlaneMap + ?Sized>(
    f: &F,
    g: &G,
    alpha: &PolyCurve,
    _configuration: ArcConfig,
    cfg: &IndexConfig,
) -> Result<i64, IndexError> {
    for p in [alpha.start(), alpha.end()] {
        let (fp, gp) = (f.apply(p), g.apply(p));
        if fp.dist(gp) > cfg.on_tol {
            return Err(IndexError::EndpointMismatch { f: fp, g: gp });
        }
    }
    let fi = index_along(f, alpha, cfg)?;
    let gi = index_along(g, alpha, cfg)?;
    let diff = fi.index.turns - gi.index.turns;
    let k = diff.round();
    if (diff - k).abs() > cfg.int_tol {
        return Err(IndexError::NonIntegral { turns: diff, tol: cfg.int_tol });
    }
    Ok(k as i64)
}

/// Best-effort check of [`ArcConfig::JordanEnclosure`]: samples `f` along
/// `alpha` and `g` back along it, and tests that the resulting polygon is
/// simple, positively oriented, and contains every vertex of `alpha`.
pub fn check_jordan_enclosure<F: PlaneMap + ?Sized, G: PlaneMap + ?Sized>(
    f: &F,
    g: &G,
    alpha: &PolyCurve,
    samples_per_segment: usize,
    on_tol: f64,
) -> bool {
    let dense = alpha.subdivided(samples_per_segment.max(1));
    let mut ring: Vec<Point2> = dense.vertices().iter().map(|&p| f.apply(p)).collect();
    let back: Vec<Point2> = dense.vertices().iter().rev().map(|&p| g.apply(p)).collect();
    // Shared endpoint images appear once.
    ring.extend(back.into_iter().skip(1));
    ring.pop();
    ring.dedup();
    let Ok(curve) = PolyCurve::closed(ring) else {
        return false;
    };
    if !curve.is_simple(on_tol) {
        return false;
    }
    if crate::geometry::curve_orientation(&curve, on_tol) != Ok(crate::geometry::Orientation::Positive) {
        return false;
    }
    alpha.vertices().iter().all(|&p| {
        crate::geometry::point_in_polygon(p, &curve, on_tol) == Ok(crate::geometry::Containment::Inside)
    })
}

/// Convenience for maps only defined as closures along a curve.
pub fn closure_map<F: Fn(Point2) -> Point2 + Send + Sync>(id: &str, f: F) -> FnMap<F> {
    FnMap::new(id, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_circle() -> PolyCurve {
        PolyCurve::circle(Point2::ORIGIN, 1.0, 64).unwrap()
    }

    fn idx<F: PlaneMap + ?Sized>(f: &F, c: &PolyCurve) -> i64 {
        index_along(f, c, &IndexConfig::default()).unwrap().integer().unwrap()
    }

    #[test]
    fn basic_indices() {
        let c = unit_circle();
        assert_eq!(idx(&AffineMap::translation(3.0, 0.0), &c), 0);
        assert_eq!(idx(&AffineMap::half_turn(Point2::ORIGIN), &c), 1);
        assert_eq!(idx(&AffineMap::linear(2.0, 0.0, 0.0, 0.5).unwrap(), &c), -1);
        assert_eq!(idx(&AffineMap::scaling(0.5, Point2::ORIGIN).unwrap(), &c), 1);
    }

    #[test]
    fn fixed_point_on_curve_is_reported() {
        let c = unit_circle();
        let f = AffineMap::scaling(0.5, Point2::new(1.0, 0.0)).unwrap();
        match index_along(&f, &c, &IndexConfig::default()) {
            Err(IndexError::FixedPointOnCurve { point, .. }) => assert!(point.dist(Point2::new(1.0, 0.0)) < 1e-9),
            other => panic!("expected fixed point error, got {other:?}"),
        }
    }

    #[test]
    fn refinement_budget_is_enforced() {
        // Displacement direction swings by 3 rad across a 1e-9 wide band at
        // x = 0.3, which the circle crosses twice.
        let c = unit_circle();
        let f = closure_map("swing", |p: Point2| {
            let phi = 1.5 * ((p.x - 0.3) / 1e-9).tanh();
            p + Point2::new(phi.cos(), phi.sin())
        });
        let tight = IndexConfig { max_samples: 80, initial_samples: 1, ..IndexConfig::default() };
        assert!(matches!(index_along(&f, &c, &tight), Err(IndexError::RefinementExhausted { .. })));
        let roomy = IndexConfig { max_samples: 200, ..tight };
        let cert = index_along(&f, &c, &roomy).unwrap();
        assert_eq!(cert.integer(), Some(0));
        assert!(cert.samples_used > 80);
    }

    #[test]
    fn near_fixed_point_still_lifts() {
        let c = unit_circle();
        let inside = AffineMap::half_turn(Point2::new(1.0 - 1e-4, 0.0));
        let outside = AffineMap::half_turn(Point2::new(1.0 + 1e-4, 0.0));
        assert_eq!(idx(&inside, &c), 1);
        assert_eq!(idx(&outside, &c), 0);
    }

    #[test]
    fn samples_respect_gap_and_budget() {
        let c = unit_circle();
        let cfg = IndexConfig::default();
        let f = AffineMap::rotation(2.5, Point2::new(0.3, 0.1));
        let l = lift(&f, &c, &cfg).unwrap();
        assert!(l.samples.len() >= cfg.initial_samples);
        for w in l.samples.windows(2) {
            assert!((w[1].angle - w[0].angle).abs() < cfg.max_gap);
            assert!(w[1].t >= w[0].t);
        }
        assert_eq!(l.samples.last().unwrap().t, 1.0);
    }

    #[test]
    fn open_arc_reports_fractional_turns() {
        let arc = PolyCurve::open(vec![Point2::new(-1.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 0.0)])
            .unwrap();
        let f = AffineMap::half_turn(Point2::ORIGIN);
        let cert = index_along(&f, &arc, &IndexConfig::default()).unwrap();
        assert_eq!(cert.index.snapped, None);
        // Displacement -2p turns by -1/2 while p goes from angle π to 0 clockwise.
        assert!((cert.index.turns + 0.5).abs() < 1e-12);
    }

    #[test]
    fn reversal_and_conjugation() {
        let cfg = IndexConfig::default();
        let c = unit_circle();
        let f = AffineMap::half_turn(Point2::ORIGIN);
        assert!(index_reverse_check(&f, &c, &cfg).unwrap());
        let arc = PolyCurve::open(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.3)]).unwrap();
        assert!(index_reverse_check(&AffineMap::translation(0.0, 2.0), &arc, &cfg).unwrap());

        assert!(conjugation_invariance_check(&f, &AffineMap::identity(), &c, &cfg).unwrap());
        let s3 = AffineMap::scaling(3.0, Point2::ORIGIN).unwrap();
        assert!(conjugation_invariance_check(&f, &s3, &c, &cfg).unwrap());
        let hyper = AffineMap::linear(2.0, 0.0, 0.0, 0.5).unwrap();
        let rot = AffineMap::rotation(0.7, Point2::ORIGIN);
        assert!(conjugation_invariance_check(&hyper, &rot, &c, &cfg).unwrap());
    }

    #[test]
    fn arc_endpoint_mismatch() {
        let arc = PolyCurve::open(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).unwrap();
        let f = AffineMap::translation(0.0, 1.0);
        let g = AffineMap::translation(0.0, 2.0);
        assert!(matches!(
            arc_index_difference(&f, &g, &arc, ArcConfig::HalfLineAvoidance, &IndexConfig::default()),
            Err(IndexError::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn jordan_enclosure_check() {
        let arc = PolyCurve::open((0..=16).map(|i| Point2::new(-0.5 + i as f64 / 16.0, 0.0)).collect()).unwrap();
        let lower = closure_map("lower", |p: Point2| {
            let t = p.x + 0.5;
            Point2::new((PI + PI * t).cos(), (PI + PI * t).sin())
        });
        let upper = closure_map("upper", |p: Point2| {
            let t = p.x + 0.5;
            Point2::new((PI - PI * t).cos(), (PI - PI * t).sin())
        });
        assert!(check_jordan_enclosure(&lower, &upper, &arc, 4, 1e-9));
        assert!(!check_jordan_enclosure(&upper, &lower, &arc, 4, 1e-9));
    }
}
