mod common;

use std::f64::consts::PI;

use planefix::geometry::{point_in_polygon, Containment, Point2, PolyCurve};
use planefix::index::{
    arc_index_difference, check_jordan_enclosure, closure_map, conjugation_invariance_check, index_along,
    index_reverse_check, ArcConfig, IndexConfig, IndexError,
};
use planefix::maps::{AffineMap, PlaneMap};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{dense_turns, random_affine, random_curve, star_curve};

fn cfg() -> IndexConfig {
    IndexConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn affine_index_laws(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_affine(&mut rng);
        let c = random_curve(&mut rng, Point2::new(0.3, -0.2), 1.5);
        let cert = match index_along(&f, &c, &cfg()) {
            Ok(c) => c,
            // Rejected inputs are fine; silent wrong answers are not.
            Err(IndexError::FixedPointOnCurve { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let k = cert.integer().unwrap();
        prop_assert!((cert.index.turns - k as f64).abs() <= 1e-6);

        // The only fixed point of an affine map decides the index: its sign
        // is that of det(A - I).
        if let Some(p) = f.fixed_point() {
            let d = det_minus_identity(&f);
            match point_in_polygon(p, &c, 1e-9) {
                Ok(Containment::Inside) if d.abs() > 1e-6 => prop_assert_eq!(k, d.signum() as i64),
                Ok(Containment::Outside) => prop_assert_eq!(k, 0),
                _ => {}
            }
        }

        prop_assert!(index_reverse_check(&f, &c, &cfg()).unwrap());
        prop_assert_eq!(index_along(&f, &c.rotated(seed as usize % c.len()), &cfg()).unwrap().integer(), Some(k));
        prop_assert_eq!(index_along(&f, &c.subdivided(3), &cfg()).unwrap().integer(), Some(k));
        let g = random_affine(&mut rng);
        prop_assert!(conjugation_invariance_check(&f, &g, &c, &cfg()).unwrap());
    }

    #[test]
    fn translation_never_winds(seed in any::<u64>(), dx in -3.0..3.0f64, dy in -3.0..3.0f64) {
        prop_assume!(dx.hypot(dy) > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_curve(&mut rng, Point2::ORIGIN, 2.0);
        let t = AffineMap::translation(dx, dy);
        prop_assert_eq!(index_along(&t, &c, &cfg()).unwrap().integer(), Some(0));
    }

    #[test]
    fn inward_maps_have_index_one(seed in any::<u64>()) {
        // A contraction sending the unit disc into its interior.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_affine(&mut rng);
        let s = 0.9 / f.linear_norm();
        let a = AffineMap::new(
            [[f.matrix[0][0] * s, f.matrix[0][1] * s], [f.matrix[1][0] * s, f.matrix[1][1] * s]],
            Point2::new(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05)),
            "inward",
        ).unwrap();
        let c = PolyCurve::circle(Point2::ORIGIN, 1.0, 97).unwrap();
        prop_assert_eq!(index_along(&a, &c, &cfg()).unwrap().integer(), Some(1));
    }
}

fn det_minus_identity(a: &AffineMap) -> f64 {
    let m = a.matrix;
    (m[0][0] - 1.0) * (m[1][1] - 1.0) - m[0][1] * m[1][0]
}

#[test]
fn hyperbolic_matches_dense_oracle() {
    let f = AffineMap::linear(2.0, 0.0, 0.0, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut curves = vec![PolyCurve::circle(Point2::ORIGIN, 1.0, 64).unwrap()];
    curves.push(PolyCurve::rectangle(Point2::new(-0.3, -2.0), Point2::new(3.0, 0.1)).unwrap());
    for _ in 0..3 {
        curves.push(star_curve(&mut rng, Point2::new(0.1, -0.1), 0.5, 2.0, 17));
    }
    for c in &curves {
        let k = index_along(&f, c, &cfg()).unwrap().integer().unwrap();
        assert_eq!(k, -1);
        let dense = dense_turns(&f, c, 1_000_000);
        assert!((dense - k as f64).abs() < 1e-9, "{dense}");
    }
}

#[test]
fn rotation_index_by_containment() {
    let f = AffineMap::rotation(0.8, Point2::new(5.0, 5.0));
    let near = PolyCurve::circle(Point2::new(5.0, 5.0), 0.5, 40).unwrap();
    let far = PolyCurve::circle(Point2::ORIGIN, 0.5, 40).unwrap();
    assert_eq!(index_along(&f, &near, &cfg()).unwrap().integer(), Some(1));
    assert_eq!(index_along(&f, &far, &cfg()).unwrap().integer(), Some(0));
    assert_eq!(index_along(&f, &near.reversed(), &cfg()).unwrap().integer(), Some(-1));
}

fn semicircle_arc() -> PolyCurve {
    PolyCurve::open((0..=32).map(|i| Point2::new(-1.0 + i as f64 / 16.0, 0.0)).collect()).unwrap()
}

/// Map of the segment `[-1, 1] × {0}` onto the half-ellipse with semi-axes
/// `2` and `b` (upper for `b > 0`), endpoints to `(∓2, 0)`.
fn half_ellipse(b: f64) -> impl Fn(Point2) -> Point2 + Send + Sync {
    move |p: Point2| {
        let u = (p.x + 1.0) / 2.0;
        Point2::new(-2.0 * (PI * u).cos(), b * (PI * u).sin())
    }
}

#[test]
fn arc_comparisons() {
    let alpha = semicircle_arc();

    // Both images above the arc: nothing between them winds around it.
    let f = closure_map("upper2", half_ellipse(2.0));
    let g = closure_map("upper3", half_ellipse(3.0));
    let d = arc_index_difference(&f, &g, &alpha, ArcConfig::HalfLineAvoidance, &cfg()).unwrap();
    assert_eq!(d, ArcConfig::HalfLineAvoidance.predicted());

    // Below then back above: a positive loop around the arc.
    let f = closure_map("lower", half_ellipse(-2.0));
    let g = closure_map("upper", half_ellipse(2.0));
    assert!(check_jordan_enclosure(&f, &g, &alpha, 8, 1e-9));
    let d = arc_index_difference(&f, &g, &alpha, ArcConfig::JordanEnclosure, &cfg()).unwrap();
    assert_eq!(d, ArcConfig::JordanEnclosure.predicted());
    assert!(!check_jordan_enclosure(&g, &f, &alpha, 8, 1e-9));

    // Arcs of the unit circle. f pulls inside, g pushes outside, and the
    // ends go to the circle at angles `to.0` and `to.1`.
    let split = |from: (f64, f64), to: (f64, f64)| {
        let arc = PolyCurve::open((0..=64).map(|i| {
            let t = from.0 + (from.1 - from.0) * i as f64 / 64.0;
            Point2::new(t.cos(), t.sin())
        }).collect()).unwrap();
        let radial = move |scale: f64| {
            move |p: Point2| {
                let u = (p.y.atan2(p.x) - from.0) / (from.1 - from.0);
                let t = to.0 + (to.1 - to.0) * u;
                let r = 1.0 + scale * (PI * u).sin();
                Point2::new(r * t.cos(), r * t.sin())
            }
        };
        let f = closure_map("inside", radial(-0.5));
        let g = closure_map("outside", radial(0.5));
        arc_index_difference(&f, &g, &arc, ArcConfig::InteriorExteriorSplit, &cfg()).unwrap()
    };
    // The arc inside the stretch between the end images.
    assert_eq!(split((PI / 4.0, 3.0 * PI / 4.0), (0.0, PI)), ArcConfig::InteriorExteriorSplit.predicted());
    // Both end images inside the arc: the opposite sign.
    assert_eq!(split((0.0, PI), (PI / 4.0, 3.0 * PI / 4.0)), 1);
}

#[test]
fn arc_endpoints_must_agree() {
    let alpha = semicircle_arc();
    let f = closure_map("upper2", half_ellipse(2.0));
    let g = AffineMap::translation(0.0, 3.0);
    assert!(matches!(
        arc_index_difference(&f, &g, &alpha, ArcConfig::HalfLineAvoidance, &cfg()),
        Err(IndexError::EndpointMismatch { .. })
    ));
}

#[test]
fn dense_oracle_agrees_on_catalog_panel() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..40 {
        let h = common::random_catalog_map(&mut rng);
        let c = random_curve(&mut rng, Point2::new(0.2, 0.1), 1.2);
        let Ok(cert) = index_along(&*h, &c, &cfg()) else { continue };
        // Plain summation aliases when steps jump by more than π; only
        // compare where the displacement is not tiny.
        if cert.min_displacement < 1e-3 {
            continue;
        }
        let dense = dense_turns(&*h, &c, 20_000);
        assert_eq!(Some(dense.round() as i64), cert.integer(), "{} on {}", h.id(), c.fingerprint());
        checked += 1;
    }
    assert!(checked >= 20, "{checked}");
}
