//! Planar fixed-point toolkit.
//!
//! - [`geometry`]: points, segments, polygonal curves and predicates.
//! - [`maps`]: plane maps and a catalog of orientation-preserving homeomorphisms.
//! - [`index`]: the index of a map along a curve, by continuous angle lifting.
//! - [`grid`]: dyadic cell continua, their nested disc approximations and
//!   nearest-point access segments.
//! - [`fixedpoint`]: invariance checks, cut classification, and fixed-point
//!   location by degree bisection.

pub mod fixedpoint;
pub mod geometry;
pub mod grid;
pub mod index;
pub mod maps;

pub use fixedpoint::{
    certify_theorem_a, certify_theorem_d, locate_by_subdivision, two_fixed_points_scenario, FixedPointError,
    FixedPointResult, PipelineConfig,
};
pub use geometry::{Containment, Intersection, Orientation, Point2, PolyCurve, Segment};
pub use grid::{build_disc, refine, validate_continuum, DiscApproximation, GridContinuum, GridError};
pub use index::{index_along, IndexCertificate, IndexConfig, IndexError};
pub use maps::{AffineMap, Homeomorphism, PlaneMap};
