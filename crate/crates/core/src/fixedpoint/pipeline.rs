use std::f64::consts::SQRT_2;

use serde::Serialize;

use super::cuts::{build_cuts, classify_cut, subdivision_points, Classification, CutRegion};
use super::locate::{locate_or_witness, pow2_ceil, Rect};
use super::{check_invariance, FixedPointError, FixedPointResult, InvarianceReport, PipelineConfig};
use crate::geometry::{dyadic, Point2, PolyCurve};
use crate::grid::{build_disc, trace_boundary, validate_continuum, Bitmap, Cell, DiscApproximation, GridContinuum, GridError};
use crate::index::{index_along, IndexCertificate, IndexError};
use crate::maps::{Homeomorphism, PlaneMap};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Outcome {
    FixedPointFound(FixedPointResult),
    IndexWitness { certificate: IndexCertificate, expanding_count: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    /// Exponent `m` of the disc approximation whose boundary is `C`.
    pub exponent: u32,
    /// A third of the smallest displacement seen on `C`.
    pub epsilon: f64,
    /// Whether `√2 · 2^-m < ε`, i.e. the cuts are provably short enough.
    pub epsilon_condition_met: bool,
    pub invariance: InvarianceReport,
    pub boundary: PolyCurve,
    pub index: IndexCertificate,
    pub cuts: Vec<CutRegion>,
    pub expanding_count: usize,
    /// Every cut was classified and none was violated.
    pub all_clean: bool,
    pub outcome: Outcome,
}

impl CertificationReport {
    /// `i(h, C) = 1 + k` with `k` the number of expanding regions; `None`
    /// unless every cut classified cleanly.
    pub fn cut_count_consistent(&self) -> Option<bool> {
        self.all_clean.then(|| self.index.integer() == Some(1 + self.expanding_count as i64))
    }

    pub fn fixed_point(&self) -> Option<&FixedPointResult> {
        match &self.outcome {
            Outcome::FixedPointFound(r) => Some(r),
            Outcome::IndexWitness { .. } => None,
        }
    }

    pub fn disc(&self, g: &GridContinuum, cfg: &PipelineConfig) -> Result<DiscApproximation, GridError> {
        build_disc(g, self.exponent, &cfg.grid)
    }
}

fn classify_with_refinement<H: Homeomorphism + ?Sized>(h: &H, cut: &CutRegion, g: &GridContinuum) -> Option<Classification> {
    let mut current = cut.clone();
    for _ in 0..3 {
        match classify_cut(h, &current, g) {
            Ok(c) => return Some(c),
            Err(_) => current = current.with_pitch(current.pitch / 2.0),
        }
    }
    None
}

/// Certifies a fixed point of `h` in (or, with a coarse `C`, near) the
/// invariant continuum `g`.
///
/// Chooses the smallest `m ≥ n` with `√2 · 2^-m < ε`, `ε` a third of the
/// least displacement on `C = ∂B_m`; if no `m` within `max_extra_depth`
/// achieves it, the first usable `m` is kept and the report says so. Cuts
/// are placed greedily so every arc of `C` between them has diameter `< ε`.
pub fn certify_theorem_a<H: Homeomorphism + ?Sized>(
    h: &H,
    g: &GridContinuum,
    cfg: &PipelineConfig,
) -> Result<CertificationReport, FixedPointError> {
    let validation = validate_continuum(g);
    if !validation.admissible() {
        return Err(GridError::Inadmissible(validation).into());
    }
    let invariance = check_invariance(h, g, cfg.kappa);
    if !invariance.passes(cfg.invariance) {
        return Err(FixedPointError::NotInvariant(invariance));
    }

    let n = g.exponent();
    let top = (n + cfg.max_extra_depth).min(cfg.grid.depth_limit);
    let mut first_usable = None;
    let mut chosen = None;
    let mut on_curve = 0;
    let mut last_err = None;
    for m in n..=top {
        let disc = build_disc(g, m, &cfg.grid)?;
        match index_along(h, disc.boundary(), &cfg.index) {
            Ok(cert) => {
                let eps = cert.min_displacement / 3.0;
                let met = SQRT_2 * dyadic(1, m) < eps;
                if met {
                    chosen = Some((disc, cert, eps, true));
                    break;
                }
                if first_usable.is_none() {
                    first_usable = Some((disc, cert, eps, false));
                }
            }
            Err(e @ IndexError::FixedPointOnCurve { .. }) => {
                on_curve += 1;
                last_err = Some(e);
                if on_curve > cfg.curve_retries {
                    break;
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    let Some((disc, index, epsilon, met)) = chosen.or(first_usable) else {
        return Err(last_err.expect("loop ran at least once").into());
    };
    let m = disc.exponent();
    let boundary = disc.boundary().clone();

    let arc_bound = if met { epsilon } else { epsilon.max(dyadic(3, m + 1)) };
    let sites = subdivision_points(&boundary, arc_bound);
    let mut cuts = build_cuts(&disc, &sites, g, cfg.grid.on_tol)?;
    for cut in &mut cuts {
        cut.classification = classify_with_refinement(h, cut, g);
    }
    let expanding_count = cuts.iter().filter(|c| c.classification == Some(Classification::Expanding)).count();
    let all_clean = cuts.iter().all(|c| matches!(c.classification, Some(k) if k != Classification::Violated));

    let outcome = if cfg.witness_only {
        Outcome::IndexWitness { certificate: index.clone(), expanding_count }
    } else {
        Outcome::FixedPointFound(locate_or_witness(h, &boundary, cfg)?)
    };
    Ok(CertificationReport {
        exponent: m,
        epsilon,
        epsilon_condition_met: met,
        invariance,
        boundary,
        index,
        cuts,
        expanding_count,
        all_clean,
        outcome,
    })
}

/// Finds a fixed point of `h` given a finite invariant set (e.g. a
/// periodic orbit), by scanning squares of doubling side about the set.
pub fn certify_theorem_d<H: PlaneMap + ?Sized>(
    h: &H,
    invariant_set: &[Point2],
    cfg: &PipelineConfig,
) -> Result<FixedPointResult, FixedPointError> {
    if invariant_set.is_empty() {
        return Err(FixedPointError::EmptyInvariantSet);
    }
    for &p in invariant_set {
        let q = h.apply(p);
        let distance = invariant_set.iter().map(|&s| s.dist(q)).fold(f64::INFINITY, f64::min);
        if distance > cfg.inverse_tol {
            return Err(FixedPointError::NotPermuted { point: p, distance });
        }
    }
    let (mut lo, mut hi) = (invariant_set[0], invariant_set[0]);
    for p in invariant_set {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let mut side = pow2_ceil((hi.x - lo.x).max(hi.y - lo.y).max(dyadic(1, 10))) * 2.0;
    // Center on the lattice of pitch side/16 so every corner is dyadic.
    let snap = |v: f64, q: f64| (v / q).round() * q;
    while side / 2.0 <= cfg.search_radius {
        let q = side / 16.0;
        let c = lo.midpoint(hi);
        let square = Rect::square(Point2::new(snap(c.x, q), snap(c.y, q)), side);
        match index_along(h, &square.curve(), &cfg.index) {
            Ok(cert) if cert.integer().unwrap_or(0) != 0 => return locate_or_witness(h, &square.curve(), cfg),
            Ok(_) => {}
            Err(IndexError::FixedPointOnCurve { point, displacement, .. }) => {
                return Ok(FixedPointResult::witnessed(point, displacement));
            }
            Err(_) => {}
        }
        side *= 2.0;
    }
    Err(FixedPointError::SearchExhausted { radius: cfg.search_radius })
}

fn push_distinct(found: &mut Vec<FixedPointResult>, r: FixedPointResult, tol: f64) {
    if found.iter().all(|f| f.point.dist(r.point) > tol) {
        found.push(r);
    }
}

fn search_piece<H: Homeomorphism + ?Sized>(
    h: &H,
    cells: &[Cell],
    m: u32,
    depth: usize,
    horizontal: bool,
    cfg: &PipelineConfig,
    found: &mut Vec<FixedPointResult>,
) -> Result<(), FixedPointError> {
    let bitmap = Bitmap::from_cells(cells.iter().copied(), 2);
    let Ok(curve) = trace_boundary(&bitmap, m) else {
        return Ok(());
    };
    match index_along(h, &curve, &cfg.index) {
        Ok(cert) if cert.integer().unwrap_or(0) != 0 => {
            let r = locate_or_witness(h, &curve, cfg)?;
            push_distinct(found, r, cfg.dedup_tol);
        }
        Ok(_) if depth < cfg.split_depth => {
            // Zero index can hide fixed points of opposite index: halve the
            // piece along its long axis and look again.
            let key = |c: &Cell| if horizontal { c.0 } else { c.1 };
            let (lo, hi) = cells.iter().map(key).fold((i64::MAX, i64::MIN), |(a, b), k| (a.min(k), b.max(k)));
            if hi > lo {
                let mid = lo + (hi - lo + 1) / 2;
                let (left, right): (Vec<Cell>, Vec<Cell>) = cells.iter().partition(|c| key(c) < mid);
                for half in [left, right] {
                    for piece in Bitmap::from_cells(half.iter().copied(), 2).components() {
                        search_piece(h, &piece, m, depth + 1, horizontal, cfg, found)?;
                    }
                }
            }
        }
        Ok(_) => {}
        Err(IndexError::FixedPointOnCurve { point, displacement, .. }) => {
            push_distinct(found, FixedPointResult::witnessed(point, displacement), cfg.dedup_tol);
        }
        Err(_) => {}
    }
    Ok(())
}

/// Certifies one fixed point, cuts a strip across the disc approximation
/// around it, and searches each remaining piece for more.
pub fn two_fixed_points_scenario<H: Homeomorphism + ?Sized>(
    h: &H,
    g: &GridContinuum,
    cfg: &PipelineConfig,
) -> Result<Vec<FixedPointResult>, FixedPointError> {
    let cfg = PipelineConfig { witness_only: false, ..*cfg };
    let report = certify_theorem_a(h, g, &cfg)?;
    let first = report.fixed_point().cloned().expect("located outcome");
    let disc = report.disc(g, &cfg)?;
    let m = disc.exponent();
    let (lo, hi) = disc.boundary().bbox();
    let horizontal = hi.x - lo.x >= hi.y - lo.y;
    let p = first.point;
    let scale = (1u64 << m) as f64;
    let kept: Vec<Cell> = disc
        .region()
        .cells()
        .filter(|&(k, l)| {
            let (along, at) = if horizontal { (k as f64 / scale, p.x) } else { (l as f64 / scale, p.y) };
            (along - at).abs() > cfg.excision_radius
        })
        .collect();
    let mut found = vec![first];
    if kept.is_empty() {
        return Ok(found);
    }
    for piece in Bitmap::from_cells(kept.iter().copied(), 2).components() {
        search_piece(h, &piece, m, 0, horizontal, &cfg, &mut found)?;
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::{InvariancePolicy, ResultSource};
    use crate::maps::{AffineMap, FlowMap, SegmentShear};
    use std::f64::consts::PI;

    fn disc5() -> GridContinuum {
        GridContinuum::block(2, -2..=2, -2..=2).unwrap()
    }

    #[test]
    fn rotation_disc() {
        let h = AffineMap::rotation(1.0, Point2::ORIGIN);
        let cfg = PipelineConfig::default();
        let r = certify_theorem_a(&h, &disc5(), &cfg).unwrap();
        let fp = r.fixed_point().unwrap();
        assert!(fp.point.norm() <= dyadic(1, 10));
        assert!(fp.certificate_chain.iter().all(|c| c.integer() == Some(1)));
        assert_eq!(r.index.integer(), Some(1));
        assert!(r.epsilon_condition_met);
        assert!(r.all_clean);
        assert_eq!(r.cut_count_consistent(), Some(true));
    }

    #[test]
    fn half_turn_segment() {
        let g = GridContinuum::horizontal_segment(3, -1.0, 1.0).unwrap();
        let h = AffineMap::half_turn(Point2::ORIGIN);
        let r = certify_theorem_a(&h, &g, &PipelineConfig::default()).unwrap();
        assert!(r.fixed_point().unwrap().point.norm() <= dyadic(1, 10));
        assert!(r.epsilon_condition_met);
    }

    #[test]
    fn identity_fails_on_curve() {
        let err = certify_theorem_a(&AffineMap::identity(), &disc5(), &PipelineConfig::default()).unwrap_err();
        assert!(matches!(err, FixedPointError::Index(IndexError::FixedPointOnCurve { .. })), "{err}");
    }

    #[test]
    fn witness_only_reports_index() {
        let h = AffineMap::rotation(1.0, Point2::ORIGIN);
        let cfg = PipelineConfig { witness_only: true, ..Default::default() };
        let r = certify_theorem_a(&h, &disc5(), &cfg).unwrap();
        match r.outcome {
            Outcome::IndexWitness { ref certificate, expanding_count } => {
                assert_eq!(certificate.integer(), Some(1 + expanding_count as i64));
            }
            _ => panic!("expected witness"),
        }
    }

    #[test]
    fn not_invariant_rejected() {
        let h = AffineMap::translation(3.0, 0.0);
        assert!(matches!(
            certify_theorem_a(&h, &disc5(), &PipelineConfig::default()),
            Err(FixedPointError::NotInvariant(_))
        ));
    }

    #[test]
    fn theorem_d_examples() {
        let cfg = PipelineConfig::default();
        let h = AffineMap::half_turn(Point2::ORIGIN);
        let r = certify_theorem_d(&h, &[Point2::new(1.0, 0.0), Point2::new(-1.0, 0.0)], &cfg).unwrap();
        assert!(r.point.norm() <= dyadic(1, 10));

        let c = Point2::new(1.0, 1.0);
        let rot = AffineMap::rotation(2.0 * PI / 3.0, c);
        let p0 = Point2::new(2.0, 1.0);
        let orbit = [p0, rot.apply(p0), rot.apply(rot.apply(p0))];
        let r = certify_theorem_d(&rot, &orbit, &cfg).unwrap();
        assert!(r.point.dist(c) <= dyadic(1, 10));

        assert_eq!(
            certify_theorem_d(&AffineMap::translation(1.0, 0.0), &[], &cfg),
            Err(FixedPointError::EmptyInvariantSet)
        );
        assert!(matches!(
            certify_theorem_d(&AffineMap::translation(1.0, 0.0), &[p0], &cfg),
            Err(FixedPointError::NotPermuted { .. })
        ));
    }

    #[test]
    fn theorem_d_search_exhausts() {
        // The first square already exceeds the allowed radius.
        let h = AffineMap::rotation(PI, Point2::new(100.0, 0.0));
        let set = [Point2::new(99.0, 0.0), Point2::new(101.0, 0.0)];
        let cfg = PipelineConfig { search_radius: 0.5, ..Default::default() };
        assert_eq!(certify_theorem_d(&h, &set, &cfg), Err(FixedPointError::SearchExhausted { radius: 0.5 }));
    }

    #[test]
    fn two_fixed_points_flow() {
        let g = GridContinuum::horizontal_segment(3, -1.5, 1.5).unwrap();
        let h = FlowMap::bistable();
        let cfg = PipelineConfig { invariance: InvariancePolicy::Forward, ..Default::default() };
        let found = two_fixed_points_scenario(&h, &g, &cfg).unwrap();
        let targets = [Point2::new(-1.0, 0.0), Point2::ORIGIN, Point2::new(1.0, 0.0)];
        assert!(found.len() >= 2, "{found:?}");
        for f in &found {
            assert!(targets.iter().any(|t| t.dist(f.point) < 1e-3), "{:?}", f.point);
        }
    }

    #[test]
    fn two_fixed_points_half_turn_control() {
        let g = GridContinuum::horizontal_segment(3, -1.5, 1.5).unwrap();
        let found = two_fixed_points_scenario(&AffineMap::half_turn(Point2::ORIGIN), &g, &PipelineConfig::default()).unwrap();
        assert_eq!(found.len(), 1);
    }

    #[test]
    fn two_fixed_points_shear() {
        let g = GridContinuum::horizontal_segment(3, -1.5, 1.5).unwrap();
        let h = SegmentShear::new(1.5, 0.1).unwrap();
        let found = two_fixed_points_scenario(&h, &g, &PipelineConfig::default()).unwrap();
        assert!(found.len() >= 2, "{found:?}");
        for f in &found {
            assert!(matches!(f.source, ResultSource::Witnessed { .. }) || h.apply(f.point).dist(f.point) < 1e-5);
        }
    }
}
