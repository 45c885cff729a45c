#![allow(dead_code)]

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use planefix::geometry::{Point2, PolyCurve};
use planefix::grid::{frontier, GridContinuum};
use planefix::maps::{AffineMap, Composition, FlowMap, Homeomorphism, PlaneMap, SegmentShear, SquareTwist};
use rand::Rng;

/// Star-shaped polygon about `center`: radii in `[r0, r1]` at jittered,
/// strictly increasing angles, so the result is simple and counter-clockwise.
pub fn star_curve<R: Rng>(rng: &mut R, center: Point2, r0: f64, r1: f64, n: usize) -> PolyCurve {
    let pts = (0..n)
        .map(|i| {
            let t = (i as f64 + rng.gen_range(0.0..0.8)) / n as f64 * TAU;
            let r = rng.gen_range(r0..=r1);
            center + Point2::new(t.cos(), t.sin()) * r
        })
        .collect();
    PolyCurve::closed(pts).unwrap()
}

/// Frontier of a random blob, scaled and shifted.
pub fn lattice_curve<R: Rng>(rng: &mut R, scale: f64, offset: Point2) -> PolyCurve {
    loop {
        let cells = rng.gen_range(3..30);
        // Diagonal pinches have no simple frontier; draw again.
        if let Ok(c) = frontier(&GridContinuum::random(rng, 2, cells)) {
            return c.map_vertices(|p| offset + p * scale).unwrap();
        }
    }
}

/// Either kind of test curve, within `radius` of `center`.
pub fn random_curve<R: Rng>(rng: &mut R, center: Point2, radius: f64) -> PolyCurve {
    if rng.gen_bool(0.5) {
        let n = rng.gen_range(3..40);
        star_curve(rng, center, radius * 0.2, radius, n)
    } else {
        // Blobs of exponent 2 stay within a few units of the origin.
        lattice_curve(rng, radius / 4.0, center)
    }
}

pub fn random_affine<R: Rng>(rng: &mut R) -> AffineMap {
    loop {
        let m = [[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)], [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]];
        let off = Point2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if let Ok(a) = AffineMap::new(m, off, "random") {
            if a.det() > 0.1 {
                return a;
            }
        }
    }
}

/// A catalog map drawn at random, occasionally composed with an affine one.
pub fn random_catalog_map<R: Rng>(rng: &mut R) -> Arc<dyn Homeomorphism> {
    let c = Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let base: Arc<dyn Homeomorphism> = match rng.gen_range(0..8) {
        0 => Arc::new(AffineMap::rotation(rng.gen_range(-PI..PI), c)),
        1 => Arc::new(AffineMap::scaling(rng.gen_range(0.2..3.0), c).unwrap()),
        2 => Arc::new(AffineMap::translation(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))),
        3 => Arc::new(AffineMap::half_turn(c)),
        4 => Arc::new(FlowMap::bistable()),
        5 => Arc::new(SegmentShear::new(rng.gen_range(0.0..1.5), rng.gen_range(0.05..0.45)).unwrap()),
        6 => Arc::new(SquareTwist::new(c, rng.gen_range(0.2..1.0), rng.gen_range(1.5..4.0), rng.gen_range(-2.0..2.0)).unwrap()),
        _ => Arc::new(random_affine(rng)),
    };
    if rng.gen_bool(0.2) {
        Arc::new(Composition::new(vec![base, Arc::new(random_affine(rng))]).unwrap())
    } else {
        base
    }
}

/// Winding of `f(x) - x` by plain summation of principal angle steps over
/// `n` points spread evenly by arc length.
pub fn dense_turns<F: PlaneMap + ?Sized>(f: &F, c: &PolyCurve, n: usize) -> f64 {
    let total = c.length();
    let segs: Vec<_> = c.segments().collect();
    let mut seg = 0;
    let mut seg_start = 0.0;
    let angle = |p: Point2| {
        let d = f.apply(p) - p;
        d.y.atan2(d.x)
    };
    let first = angle(c.start());
    let mut prev = first;
    let mut sum = 0.0;
    for i in 1..n {
        let s = total * i as f64 / n as f64;
        while seg + 1 < segs.len() && seg_start + segs[seg].length() < s {
            seg_start += segs[seg].length();
            seg += 1;
        }
        let t = ((s - seg_start) / segs[seg].length()).clamp(0.0, 1.0);
        let a = angle(segs[seg].a.lerp(segs[seg].b, t));
        sum += wrap(a - prev);
        prev = a;
    }
    sum += wrap(first - prev);
    sum / TAU
}

fn wrap(d: f64) -> f64 {
    let mut d = d % TAU;
    if d > PI {
        d -= TAU;
    } else if d < -PI {
        d += TAU;
    }
    d
}
