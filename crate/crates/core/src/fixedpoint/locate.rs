use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{FixedPointError, FixedPointResult, PipelineConfig, ResultSource};
use crate::geometry::{Point2, PolyCurve};
use crate::index::{index_along, IndexCertificate, IndexConfig, IndexError};
use crate::maps::PlaneMap;

/// Axis-aligned rectangle `[lo.x, hi.x] × [lo.y, hi.y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub lo: Point2,
    pub hi: Point2,
}

impl Rect {
    pub fn new(lo: Point2, hi: Point2) -> Self {
        Self { lo, hi }
    }

    /// Square of side `side` centered at `c`.
    pub fn square(c: Point2, side: f64) -> Self {
        let h = Point2::new(side / 2.0, side / 2.0);
        Self { lo: c - h, hi: c + h }
    }

    pub fn center(&self) -> Point2 {
        self.lo.midpoint(self.hi)
    }

    pub fn diameter(&self) -> f64 {
        self.lo.dist(self.hi)
    }

    pub fn max_side(&self) -> f64 {
        (self.hi.x - self.lo.x).max(self.hi.y - self.lo.y)
    }

    pub fn contains(&self, p: Point2) -> bool {
        (self.lo.x..=self.hi.x).contains(&p.x) && (self.lo.y..=self.hi.y).contains(&p.y)
    }

    /// Counter-clockwise boundary.
    pub fn curve(&self) -> PolyCurve {
        PolyCurve::rectangle(self.lo, self.hi).expect("rectangle has positive extent")
    }

    /// Quadrants cut at `(x, y)`: lower-left, lower-right, upper-left,
    /// upper-right.
    pub fn split(&self, x: f64, y: f64) -> [Rect; 4] {
        let (lo, hi) = (self.lo, self.hi);
        [
            Rect::new(lo, Point2::new(x, y)),
            Rect::new(Point2::new(x, lo.y), Point2::new(hi.x, y)),
            Rect::new(Point2::new(lo.x, y), Point2::new(x, hi.y)),
            Rect::new(Point2::new(x, y), hi),
        ]
    }

    /// Smallest rectangle containing `[lo, hi]` whose corners lie on the
    /// dyadic lattice of pitch `2^k / 4096`, `2^k` the largest side rounded
    /// up. Kept tight so it does not swallow fixed points outside the curve.
    pub fn dyadic_hull(lo: Point2, hi: Point2) -> Self {
        let q = pow2_ceil((hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE)) / 4096.0;
        let mut r = Self {
            lo: Point2::new((lo.x / q).floor() * q, (lo.y / q).floor() * q),
            hi: Point2::new((hi.x / q).ceil() * q, (hi.y / q).ceil() * q),
        };
        if r.hi.x == r.lo.x {
            r.hi.x += q;
        }
        if r.hi.y == r.lo.y {
            r.hi.y += q;
        }
        r
    }
}

pub(crate) fn pow2_ceil(x: f64) -> f64 {
    2f64.powi(x.log2().ceil() as i32)
}

fn pow2_floor(x: f64) -> f64 {
    2f64.powi(x.log2().floor() as i32)
}

/// One quadtree level: the parent's index and its four children's.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubdivisionLevel {
    pub depth: usize,
    pub region: Rect,
    pub parent_index: i64,
    pub child_indices: [i64; 4],
    pub sum_matches: bool,
    /// Dividing lines were moved off the midpoints.
    pub jittered: bool,
    pub chosen: usize,
}

/// Stable seed from a region's coordinates.
fn region_seed(r: &Rect) -> u64 {
    [r.lo.x, r.lo.y, r.hi.x, r.hi.y]
        .iter()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, v| (h ^ v.to_bits()).wrapping_mul(0x0000_0100_0000_01b3))
}

fn child_certificates<H: PlaneMap + ?Sized>(
    h: &H,
    rects: &[Rect; 4],
    cfg: &IndexConfig,
) -> Vec<Result<IndexCertificate, IndexError>> {
    std::thread::scope(|s| {
        let workers: Vec<_> = rects.iter().map(|r| s.spawn(move || index_along(h, &r.curve(), cfg))).collect();
        workers.into_iter().map(|w| w.join().expect("index worker panicked")).collect()
    })
}

/// Index along a rectangle, nudging it outward on fixed points.
fn rect_certificate<H: PlaneMap + ?Sized>(
    h: &H,
    rect: Rect,
    cfg: &PipelineConfig,
) -> Result<(Rect, IndexCertificate), FixedPointError> {
    let mut rng = ChaCha8Rng::seed_from_u64(region_seed(&rect));
    let unit = pow2_floor(rect.max_side()) / 32.0;
    let mut r = rect;
    let mut last = None;
    for _ in 0..=cfg.retry {
        match index_along(h, &r.curve(), &cfg.index) {
            Ok(c) => return Ok((r, c)),
            Err(e @ IndexError::Geometry(_)) => return Err(e.into()),
            Err(e) => last = Some(e),
        }
        let mut grow = || unit * rng.gen_range(1..=3) as f64;
        r = Rect::new(rect.lo - Point2::new(grow(), grow()), rect.hi + Point2::new(grow(), grow()));
    }
    Err(last.expect("at least one attempt").into())
}

/// Quadtree degree bisection inside the dyadic hull of `c`.
///
/// Each level splits the current rectangle at its midlines and moves into
/// the first quadrant with a nonzero boundary index. A fixed point (or a
/// failed lift) on a dividing line moves each line by a multiple of
/// `side / 32`, `side` that axis's extent rounded down to a power of two,
/// drawn from a generator seeded by the rectangle's coordinates.
pub fn locate_by_subdivision<H: PlaneMap + ?Sized>(
    h: &H,
    c: &PolyCurve,
    cfg: &PipelineConfig,
) -> Result<FixedPointResult, FixedPointError> {
    let along = index_along(h, c, &cfg.index)?;
    if along.integer().unwrap_or(0) == 0 {
        return Err(FixedPointError::ZeroIndex { context: "curve".into() });
    }
    let (lo, hi) = c.bbox();
    let (mut current, cert) = rect_certificate(h, Rect::dyadic_hull(lo, hi), cfg)?;
    let mut index = cert.integer().unwrap_or(0);
    if index == 0 {
        return Err(FixedPointError::ZeroIndex { context: "bounding rectangle".into() });
    }
    let mut chain = vec![cert];
    let mut levels = Vec::new();

    while current.diameter() > cfg.radius {
        let depth = levels.len();
        let center = current.center();
        let mut rng: Option<ChaCha8Rng> = None;
        let mut witness = None;
        let mut attempt = 0;
        let (children, certs) = loop {
            let (mut x, mut y) = (center.x, center.y);
            if attempt > 0 {
                let rng = rng.get_or_insert_with(|| ChaCha8Rng::seed_from_u64(region_seed(&current)));
                // Per-axis units keep thin rectangles from degenerating.
                let mut offset = |side: f64| {
                    let k = rng.gen_range(1..=3) as f64 * pow2_floor(side) / 32.0;
                    if rng.gen::<bool>() { k } else { -k }
                };
                x += offset(current.hi.x - current.lo.x);
                y += offset(current.hi.y - current.lo.y);
            }
            let children = current.split(x, y);
            let results = child_certificates(h, &children, &cfg.index);
            if results.iter().all(Result::is_ok) {
                break (children, results.into_iter().map(Result::unwrap).collect::<Vec<_>>());
            }
            for r in &results {
                if let Err(IndexError::FixedPointOnCurve { point, displacement, .. }) = r {
                    witness = Some((*point, *displacement));
                }
            }
            attempt += 1;
            if attempt > cfg.retry {
                return Err(FixedPointError::SubdivisionStuck { level: depth, center, witness });
            }
        };
        let child_indices: [i64; 4] = std::array::from_fn(|i| certs[i].integer().unwrap_or(0));
        let sum: i64 = child_indices.iter().sum();
        let Some(chosen) = child_indices.iter().position(|&k| k != 0) else {
            return Err(FixedPointError::SubdivisionStuck { level: depth, center, witness });
        };
        levels.push(SubdivisionLevel {
            depth,
            region: current,
            parent_index: index,
            child_indices,
            sum_matches: sum == index,
            jittered: attempt > 0,
            chosen,
        });
        current = children[chosen];
        index = child_indices[chosen];
        chain.push(certs[chosen].clone());
    }

    Ok(FixedPointResult {
        point: current.center(),
        radius: current.diameter() / 2.0,
        certificate_chain: chain,
        levels,
        source: ResultSource::Subdivision,
    })
}

/// `locate_by_subdivision`, with a fixed point met on a dividing line
/// accepted as the answer.
pub(crate) fn locate_or_witness<H: PlaneMap + ?Sized>(
    h: &H,
    c: &PolyCurve,
    cfg: &PipelineConfig,
) -> Result<FixedPointResult, FixedPointError> {
    match locate_by_subdivision(h, c, cfg) {
        Err(FixedPointError::SubdivisionStuck { witness: Some((p, d)), .. }) => Ok(FixedPointResult::witnessed(p, d)),
        Err(FixedPointError::Index(IndexError::FixedPointOnCurve { point, displacement, .. })) => {
            Ok(FixedPointResult::witnessed(point, displacement))
        }
        other => other,
    }
}
