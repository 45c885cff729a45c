use serde::Serialize;

use super::FixedPointError;
use crate::geometry::{crossing_parity, segments_intersect, Intersection, Point2, PolyCurve, Segment};
use crate::grid::{access_segments, frontier, DiscApproximation, GridContinuum, GridError};
use crate::maps::Homeomorphism;

/// How `h` moves a cut region `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// `h(Ω) ∩ Ω = ∅`.
    Disjoint,
    /// `h(Ω) ⊂ Ω`.
    Contracting,
    /// `Ω ⊂ h(Ω)`.
    Expanding,
    /// `h` moves the cut onto itself; the region is not classifiable.
    Violated,
}

/// A cut `ρ_i p_i p_{i+1} ρ_{i+1}` and the bounded region `Ω_i` it cuts off
/// between the disc boundary and the continuum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutRegion {
    /// Open arc from `x_{b_i}` through `p_i … p_{i+1}` to `x_{b_{i+1}}`.
    pub cut: PolyCurve,
    /// Closed ring bounding `Ω_i`: the cut followed by the frontier of `K`
    /// walked clockwise back to the start.
    #[serde(skip)]
    pub region: Vec<Point2>,
    pub region_probe: Option<Point2>,
    /// Probe mesh pitch.
    pub pitch: f64,
    pub classification: Option<Classification>,
}

impl CutRegion {
    pub fn new(cut: PolyCurve, region: Vec<Point2>, pitch: f64) -> Self {
        let mut c = Self { cut, region, region_probe: None, pitch, classification: None };
        c.region_probe = c.probes().first().copied();
        c
    }

    /// Interior membership (boundary points are unspecified).
    pub fn contains(&self, p: Point2) -> bool {
        crossing_parity(p, &self.region)
    }

    /// Points of the mesh `pitch · (Z + ½)²` inside the region.
    pub fn probes(&self) -> Vec<Point2> {
        let (mut lo, mut hi) = (self.region[0], self.region[0]);
        for &p in &self.region {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let h = self.pitch;
        let (i0, i1) = ((lo.x / h).floor() as i64, (hi.x / h).ceil() as i64);
        let (j0, j1) = ((lo.y / h).floor() as i64, (hi.y / h).ceil() as i64);
        let mut out = Vec::new();
        for j in j0..j1 {
            for i in i0..i1 {
                let p = Point2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                if self.contains(p) {
                    out.push(p);
                }
            }
        }
        out
    }

    pub fn with_pitch(&self, pitch: f64) -> Self {
        Self::new(self.cut.clone(), self.region.clone(), pitch)
    }
}

/// Greedy subdivision of a closed curve into arcs of diameter `< eps`,
/// returned as vertex indices starting at 0. Arcs are whole edges, so an
/// edge of length `≥ eps` becomes an arc on its own.
pub fn subdivision_points(c: &PolyCurve, eps: f64) -> Vec<usize> {
    let v = c.vertices();
    let n = v.len();
    let mut points = vec![0];
    let mut start = 0;
    let mut arc: Vec<Point2> = vec![v[0]];
    let mut diam = 0.0f64;
    for k in 1..=n {
        let q = v[k % n];
        let grown = arc.iter().map(|a| a.dist(q)).fold(diam, f64::max);
        if grown < eps {
            arc.push(q);
            diam = grown;
            continue;
        }
        if k - 1 > start {
            points.push(k - 1);
            start = k - 1;
            diam = v[start].dist(q);
            arc = vec![v[start], q];
        }
        if diam >= eps || k - 1 == start && arc.len() == 1 {
            // A single edge too long for eps is an arc by itself.
            if k < n {
                points.push(k);
            }
            start = k;
            arc = vec![q];
            diam = 0.0;
        }
    }
    points
}

fn position_on(ring: &PolyCurve, x: Point2, tol: f64) -> Option<f64> {
    let v = ring.vertices();
    if let Some(i) = v.iter().position(|&p| p == x) {
        return Some(i as f64);
    }
    (0..ring.segment_count()).find_map(|i| {
        let s = ring.segment(i);
        (s.distance_to(x) <= tol).then(|| i as f64 + s.a.dist(x) / s.length())
    })
}

/// Cuts at the vertices `sites` (indices into `disc.boundary()`, increasing)
/// with access segments to `g`. The probe pitch is `2^-(m+2)`.
pub fn build_cuts(disc: &DiscApproximation, sites: &[usize], g: &GridContinuum, tol: f64) -> Result<Vec<CutRegion>, FixedPointError> {
    let c = disc.boundary();
    let n = c.len();
    if sites.len() < 2 {
        return Ok(Vec::new());
    }
    let points: Vec<Point2> = sites.iter().map(|&i| c.vertices()[i]).collect();
    let access = access_segments(disc, &points, tol)?;
    let fr = frontier(g)?;
    let fv = fr.vertices();
    let nf = fv.len() as f64;
    let pos: Vec<f64> = access
        .iter()
        .map(|a| position_on(&fr, a.target, tol).ok_or(GridError::SiteOffBoundary(a.target)))
        .collect::<Result<_, _>>()?;
    let pitch = disc.cell_size() / 4.0;
    let mut cuts = Vec::with_capacity(sites.len());
    for i in 0..sites.len() {
        let j = (i + 1) % sites.len();
        let mut cut = vec![access[i].target];
        let mut k = sites[i];
        loop {
            cut.push(c.vertices()[k]);
            if k == sites[j] {
                break;
            }
            k = (k + 1) % n;
        }
        cut.push(access[j].target);
        let mut region = cut.clone();
        let span = (pos[j] - pos[i]).rem_euclid(nf);
        let mut back: Vec<(f64, usize)> = (0..fv.len())
            .map(|k| ((pos[j] - k as f64).rem_euclid(nf), k))
            .filter(|&(d, _)| d > 0.0 && d < span)
            .collect();
        back.sort_by(|a, b| a.0.total_cmp(&b.0));
        region.extend(back.into_iter().map(|(_, k)| fv[k]));
        let cut = PolyCurve::open(cut).map_err(|e| GridError::NotADisc(e.to_string()))?;
        cuts.push(CutRegion::new(cut, region, pitch));
    }
    Ok(cuts)
}

/// `h(cut) ∩ cut ≠ ∅`, with the image polyline sampled at `pitch`.
fn cut_moves_onto_itself<H: Homeomorphism + ?Sized>(h: &H, cut: &PolyCurve, pitch: f64, tol: f64) -> bool {
    let image: Vec<Point2> = cut
        .segments()
        .flat_map(|s| {
            let k = ((s.length() / pitch).ceil() as usize).max(1);
            (0..k).map(move |t| s.a.lerp(s.b, t as f64 / k as f64))
        })
        .chain(std::iter::once(cut.end()))
        .map(|p| h.apply(p))
        .collect();
    let own: Vec<Segment> = cut.segments().collect();
    image.windows(2).any(|w| {
        let s = Segment::new(w[0], w[1]);
        own.iter().any(|o| segments_intersect(&s, o, tol) != Intersection::Disjoint)
    })
}

/// Decides which case of the cut-region trichotomy holds for `h`, using the
/// cut's probe mesh.
pub fn classify_cut<H: Homeomorphism + ?Sized>(
    h: &H,
    cut: &CutRegion,
    g: &GridContinuum,
) -> Result<Classification, FixedPointError> {
    if cut_moves_onto_itself(h, &cut.cut, cut.pitch, crate::geometry::DEFAULT_ON_TOL) {
        return Ok(Classification::Violated);
    }
    let probes = cut.probes();
    if probes.is_empty() {
        return Err(FixedPointError::AmbiguousRegion { inside: 0, probes: 0 });
    }
    let in_closure = |q: Point2| cut.contains(q) || g.contains_point(q);
    let forward: Vec<Point2> = probes.iter().map(|&p| h.apply(p)).collect();
    let backward: Vec<Point2> = probes.iter().map(|&p| h.apply_inverse(p)).collect();
    // A strong expansion can throw every probe out of Ω; Ω ∩ h⁻¹(Ω) then
    // still shows the overlap.
    let inside = forward.iter().chain(&backward).filter(|&&q| cut.contains(q)).count();
    if inside == 0 {
        return Ok(Classification::Disjoint);
    }
    if forward.iter().all(|&q| in_closure(q)) {
        return Ok(Classification::Contracting);
    }
    if backward.iter().all(|&q| in_closure(q)) {
        return Ok(Classification::Expanding);
    }
    Err(FixedPointError::AmbiguousRegion { inside, probes: probes.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_disc, GridConfig};
    use crate::maps::{AffineMap, Inverse};

    /// K is the cell `[-1/16, 1/16]²`; Ω is the wedge between K's right
    /// edge and the unit circle for angles in `[-0.3, 0.3]`. The access
    /// segments run from K's right corners, so they lean away from the
    /// radial direction and scalings about the origin move them off
    /// themselves.
    fn wedge() -> (GridContinuum, CutRegion) {
        let g = GridContinuum::new(3, [(0, 0)]).unwrap();
        let a = 0.0625;
        let mut cut = vec![Point2::new(a, -a)];
        for i in 0..=16 {
            let t = -0.3 + 0.6 * i as f64 / 16.0;
            cut.push(Point2::new(t.cos(), t.sin()));
        }
        cut.push(Point2::new(a, a));
        let region = cut.clone();
        (g, CutRegion::new(PolyCurve::open(cut).unwrap(), region, 1.0 / 32.0))
    }

    #[test]
    fn forced_classes() {
        let (g, cut) = wedge();
        assert!(cut.region_probe.is_some());
        let half = AffineMap::scaling(0.5, Point2::ORIGIN).unwrap();
        let double = AffineMap::scaling(2.0, Point2::ORIGIN).unwrap();
        let far = AffineMap::translation(10.0, 0.0);
        assert_eq!(classify_cut(&half, &cut, &g).unwrap(), Classification::Contracting);
        assert_eq!(classify_cut(&double, &cut, &g).unwrap(), Classification::Expanding);
        assert_eq!(classify_cut(&far, &cut, &g).unwrap(), Classification::Disjoint);
        assert_eq!(classify_cut(&Inverse(half), &cut, &g).unwrap(), Classification::Expanding);
        assert_eq!(classify_cut(&AffineMap::identity(), &cut, &g).unwrap(), Classification::Violated);
    }

    #[test]
    fn coarse_mesh_is_ambiguous() {
        // A sliver thinner than the pitch holds no probes.
        let (g, cut) = wedge();
        let coarse = cut.with_pitch(4.0);
        assert!(coarse.region_probe.is_none());
        let half = AffineMap::scaling(0.5, Point2::ORIGIN).unwrap();
        assert_eq!(classify_cut(&half, &coarse, &g), Err(FixedPointError::AmbiguousRegion { inside: 0, probes: 0 }));
    }

    #[test]
    fn subdivision_arcs_are_small() {
        let c = PolyCurve::rectangle(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)).unwrap().subdivided(8);
        for eps in [0.2, 0.3, 0.5, 1.2] {
            let pts = subdivision_points(&c, eps);
            let n = c.len();
            for w in 0..pts.len() {
                let (s, e) = (pts[w], if w + 1 < pts.len() { pts[w + 1] } else { n });
                let arc: Vec<Point2> = (s..=e).map(|k| c.vertices()[k % n]).collect();
                let diam = arc.iter().flat_map(|a| arc.iter().map(move |b| a.dist(*b))).fold(0.0, f64::max);
                assert!(diam < eps, "eps {eps}: arc {s}..{e} has diameter {diam}");
            }
        }
        // Edges longer than eps: every vertex is a point.
        assert_eq!(subdivision_points(&c, 0.1).len(), c.len());
    }

    #[test]
    fn cuts_around_a_square() {
        let g = GridContinuum::block(2, -2..=2, -2..=2).unwrap();
        let d = build_disc(&g, 3, &GridConfig::default()).unwrap();
        let sites = subdivision_points(d.boundary(), 0.3);
        let cuts = build_cuts(&d, &sites, &g, 1e-9).unwrap();
        assert_eq!(cuts.len(), sites.len());
        // The regions tile the annulus between C and K.
        let annulus = d.boundary().twice_signed_area() / 2.0 - 1.25 * 1.25;
        let total: f64 = cuts
            .iter()
            .map(|c| {
                let r = &c.region;
                (0..r.len()).map(|i| r[i].cross(r[(i + 1) % r.len()])).sum::<f64>() / 2.0
            })
            .sum();
        assert!((total - annulus).abs() < 1e-9, "{total} vs {annulus}");
        for c in &cuts {
            assert!(c.region_probe.is_some());
        }
        let turn = AffineMap::rotation(1.0, Point2::ORIGIN);
        for c in &cuts {
            assert_eq!(classify_cut(&turn, c, &g).unwrap(), Classification::Disjoint);
        }
    }
}
