//! Fixed-point certification for invariant continua.
//!
//! The pipeline surrounds an `h`-invariant continuum `K` by the boundary `C`
//! of a disc approximation, cuts the annulus between `C` and `K` into
//! regions `Ω_i` with access segments, classifies each region by how `h`
//! moves it, and computes `i(h, C)`. A nonzero index is turned into an
//! explicit fixed point by quadtree degree bisection.

mod cuts;
mod locate;
mod pipeline;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::Point2;
use crate::grid::{frontier, GridContinuum, GridError};
use crate::index::{IndexCertificate, IndexConfig, IndexError};
use crate::maps::Homeomorphism;

pub use cuts::{build_cuts, classify_cut, subdivision_points, Classification, CutRegion};
pub use locate::{locate_by_subdivision, Rect, SubdivisionLevel};
pub use pipeline::{
    certify_theorem_a, certify_theorem_d, two_fixed_points_scenario, CertificationReport, Outcome,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixedPointError {
    #[error("continuum is not invariant: {0}")]
    NotInvariant(InvarianceReport),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("probe mesh straddles the region ({inside} of {probes} images inside)")]
    AmbiguousRegion { inside: usize, probes: usize },
    #[error("index along the {context} is zero")]
    ZeroIndex { context: String },
    #[error("subdivision stuck at level {level} near {center}")]
    SubdivisionStuck { level: usize, center: Point2, witness: Option<(Point2, f64)> },
    #[error("invariant set is empty")]
    EmptyInvariantSet,
    #[error("image of {point} is {distance:e} away from the set")]
    NotPermuted { point: Point2, distance: f64 },
    #[error("no square of half-side up to {radius} has a nonzero index")]
    SearchExhausted { radius: f64 },
}

/// Which half of `h(K) = K` the pipeline verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InvariancePolicy {
    /// Both `h(K) ⊂ K` and `h⁻¹(K) ⊂ K`, up to slack.
    Full,
    /// Only `h(K) ⊂ K`: for maps whose inverse leaves every bounded set.
    Forward,
    /// No check; for hand-built configurations.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub index: IndexConfig,
    pub grid: crate::grid::GridConfig,
    /// Invariance slack in cells of the continuum's exponent.
    pub kappa: f64,
    pub invariance: InvariancePolicy,
    /// Subdivision stops once the region's diameter is at most this.
    pub radius: f64,
    /// Jitter attempts per subdivision level.
    pub retry: usize,
    /// Levels above the continuum's exponent tried when choosing `m`.
    pub max_extra_depth: u32,
    /// Tolerated fixed points on `C` before giving up.
    pub curve_retries: usize,
    /// Stop at the boundary index instead of locating a fixed point.
    pub witness_only: bool,
    pub search_radius: f64,
    /// Permutation tolerance for finite invariant sets.
    pub inverse_tol: f64,
    /// Half-width of the strip cut out around a found fixed point.
    pub excision_radius: f64,
    /// Bisections of zero-index pieces when looking for more fixed points.
    pub split_depth: usize,
    /// Points closer than this are the same fixed point.
    pub dedup_tol: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            index: IndexConfig::default(),
            grid: crate::grid::GridConfig::default(),
            kappa: 1.5,
            invariance: InvariancePolicy::Full,
            radius: crate::geometry::dyadic(1, 20),
            retry: 8,
            max_extra_depth: 6,
            curve_retries: 3,
            witness_only: false,
            search_radius: 64.0,
            inverse_tol: 1e-9,
            excision_radius: 0.125,
            split_depth: 3,
            dedup_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ResultSource {
    /// Center of the last nonzero-index square of the quadtree.
    Subdivision,
    /// A sample whose displacement fell below the fixed-point tolerance.
    Witnessed { displacement: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub point: Point2,
    /// The fixed point lies in the square of this half-diagonal about `point`.
    pub radius: f64,
    pub certificate_chain: Vec<IndexCertificate>,
    pub levels: Vec<SubdivisionLevel>,
    pub source: ResultSource,
}

impl FixedPointResult {
    pub fn witnessed(point: Point2, displacement: f64) -> Self {
        Self {
            point,
            radius: 0.0,
            certificate_chain: Vec::new(),
            levels: Vec::new(),
            source: ResultSource::Witnessed { displacement },
        }
    }

    /// Unjittered levels whose children's indices do not add up.
    pub fn sum_mismatches(&self) -> usize {
        self.levels.iter().filter(|l| !l.jittered && !l.sum_matches).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    /// `max dist(h(p), K)` over frontier samples `p`.
    pub forward_max: f64,
    /// `max dist(h⁻¹(p), K)`.
    pub backward_max: f64,
    pub tolerance: f64,
    pub samples: usize,
}

impl InvarianceReport {
    pub fn invariant(&self) -> bool {
        self.forward_max <= self.tolerance && self.backward_max <= self.tolerance
    }

    pub fn passes(&self, policy: InvariancePolicy) -> bool {
        match policy {
            InvariancePolicy::Full => self.invariant(),
            InvariancePolicy::Forward => self.forward_max <= self.tolerance,
            InvariancePolicy::Skip => true,
        }
    }
}

impl std::fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "forward {:.3e}, backward {:.3e}, tolerance {:.3e} over {} samples",
            self.forward_max, self.backward_max, self.tolerance, self.samples
        )
    }
}

/// Compares `h(K)` and `h⁻¹(K)` with `K` on points of the frontier of `K`.
pub fn check_invariance<H: Homeomorphism + ?Sized>(h: &H, g: &GridContinuum, kappa: f64) -> InvarianceReport {
    let samples: Vec<Point2> = match frontier(g) {
        Ok(fr) => fr.subdivided(4).vertices().to_vec(),
        // Not pinch-free: fall back to every cell corner.
        Err(_) => g
            .cells()
            .iter()
            .flat_map(|&c| {
                let (lo, hi) = g.cell_square(c);
                [lo, Point2::new(hi.x, lo.y), hi, Point2::new(lo.x, hi.y)]
            })
            .collect(),
    };
    let forward_max = samples.iter().map(|&p| g.distance_to(h.apply(p))).fold(0.0, f64::max);
    let backward_max = samples.iter().map(|&p| g.distance_to(h.apply_inverse(p))).fold(0.0, f64::max);
    InvarianceReport { forward_max, backward_max, tolerance: kappa * g.cell_size(), samples: samples.len() }
}
