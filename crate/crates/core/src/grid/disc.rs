use std::collections::HashMap;

use serde::Serialize;

use super::{cells_containing, cells_meeting, validate_continuum, Bitmap, Cell, GridConfig, GridContinuum, GridError};
use crate::geometry::{dyadic, Point2, PolyCurve};

/// Closed topological disc `B_m` built from the cells of exponent `m`
/// meeting a continuum, with its pockets filled.
#[derive(Debug, Clone, Serialize)]
pub struct DiscApproximation {
    exponent: u32,
    #[serde(skip)]
    region: Bitmap,
    boundary: PolyCurve,
    #[serde(skip)]
    source: GridContinuum,
    cell_count: usize,
}

impl DiscApproximation {
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn region(&self) -> &Bitmap {
        &self.region
    }

    /// Counter-clockwise lattice boundary, one vertex per lattice point.
    pub fn boundary(&self) -> &PolyCurve {
        &self.boundary
    }

    pub fn source(&self) -> &GridContinuum {
        &self.source
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn cell_size(&self) -> f64 {
        dyadic(1, self.exponent)
    }

    pub fn contains_cell(&self, c: Cell) -> bool {
        self.region.contains(c)
    }

    /// Closed-set membership.
    pub fn contains_point(&self, p: Point2) -> bool {
        cells_containing(p, self.exponent).iter().any(|&c| self.region.contains(c))
    }

    /// Whether every cell of `finer` lies inside the point set of `self`.
    pub fn contains_region(&self, finer: &DiscApproximation) -> bool {
        if finer.exponent < self.exponent {
            return false;
        }
        let w = 1i64 << (finer.exponent - self.exponent);
        finer.region.cells().all(|(i, j)| {
            let xs = cells_meeting(2 * i - 1, 2 * i + 1, w, false);
            let ys = cells_meeting(2 * j - 1, 2 * j + 1, w, false);
            xs.into_iter().all(|k| ys.clone().all(|l| self.region.contains((k, l))))
        })
    }

    /// `count` boundary points spread evenly by arc length.
    pub fn sample_sites(&self, count: usize) -> Vec<Point2> {
        (0..count).map(|i| self.boundary.point_at_fraction(i as f64 / count as f64)).collect()
    }

    /// Largest distance from a boundary vertex to the continuum.
    pub fn boundary_distance_to_source(&self) -> f64 {
        self.boundary.vertices().iter().map(|&v| self.source.distance_to(v)).fold(0.0, f64::max)
    }
}

/// Builds `B_m` for an admissible continuum `g`, `m >= g.exponent()`.
pub fn build_disc(g: &GridContinuum, m: u32, cfg: &GridConfig) -> Result<DiscApproximation, GridError> {
    if m > cfg.depth_limit {
        return Err(GridError::DepthLimitExceeded { requested: m, limit: cfg.depth_limit });
    }
    if m < g.exponent() {
        return Err(GridError::ExponentBelowBase { requested: m, base: g.exponent() });
    }
    let report = validate_continuum(g);
    if !report.admissible() {
        return Err(GridError::Inadmissible(report));
    }
    let (lo, hi) = g.bounds();
    let s = 1usize << (m - g.exponent());
    let span = |a: i64, b: i64| (b - a + 1) as usize * s + 6;
    let cells = span(lo.0, hi.0).saturating_mul(span(lo.1, hi.1));
    if cells > cfg.max_cells {
        return Err(GridError::GridTooLarge { cells, limit: cfg.max_cells });
    }

    let cover = g.cover(m)?;
    let region = Bitmap::from_cells(cover.iter().copied(), 2).fill_holes();
    let boundary = trace_boundary(&region, m)?;
    Ok(DiscApproximation { exponent: m, cell_count: region.count(), region, boundary, source: g.clone() })
}

/// Frontier of the continuum itself: the boundary of its cells at their own
/// exponent. Admissible continua have no pinch vertices, so this is a
/// simple counter-clockwise curve.
pub fn frontier(g: &GridContinuum) -> Result<PolyCurve, GridError> {
    trace_boundary(&Bitmap::from_cells(g.cells().iter().copied(), 2), g.exponent())
}

/// Counter-clockwise boundary of a cell region at exponent `m`.
///
/// Fails with [`GridError::NotADisc`] unless the boundary is a single
/// simple lattice cycle (no pinch vertices, no holes, one component).
pub fn trace_boundary(region: &Bitmap, m: u32) -> Result<PolyCurve, GridError> {
    // Directed unit edges in half-cell units, region on the left.
    let mut next: HashMap<(i64, i64), (i64, i64)> = HashMap::new();
    let mut add = |from: (i64, i64), to: (i64, i64)| -> Result<(), GridError> {
        if next.insert(from, to).is_some() {
            return Err(GridError::NotADisc(format!("pinch at lattice vertex {from:?}")));
        }
        Ok(())
    };
    for (i, j) in region.cells() {
        let (x0, x1, y0, y1) = (2 * i - 1, 2 * i + 1, 2 * j - 1, 2 * j + 1);
        if !region.contains((i, j - 1)) {
            add((x0, y0), (x1, y0))?;
        }
        if !region.contains((i + 1, j)) {
            add((x1, y0), (x1, y1))?;
        }
        if !region.contains((i, j + 1)) {
            add((x1, y1), (x0, y1))?;
        }
        if !region.contains((i - 1, j)) {
            add((x0, y1), (x0, y0))?;
        }
    }
    let start = *next.keys().min_by_key(|&&(x, y)| (y, x)).ok_or_else(|| GridError::NotADisc("empty region".into()))?;
    let mut loop_vertices = vec![start];
    let mut v = next[&start];
    while v != start {
        loop_vertices.push(v);
        v = *next.get(&v).ok_or_else(|| GridError::NotADisc("open boundary chain".into()))?;
        if loop_vertices.len() > next.len() {
            return Err(GridError::NotADisc("boundary does not close".into()));
        }
    }
    if loop_vertices.len() != next.len() {
        return Err(GridError::NotADisc(format!(
            "boundary has several cycles ({} of {} edges on the outer one)",
            loop_vertices.len(),
            next.len()
        )));
    }
    let e = m + 1;
    let pts = loop_vertices.into_iter().map(|(x, y)| Point2::new(dyadic(x, e), dyadic(y, e))).collect();
    PolyCurve::closed(pts).map_err(|err| GridError::NotADisc(err.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{curve_orientation, Orientation};

    fn disc(g: &GridContinuum, m: u32) -> DiscApproximation {
        build_disc(g, m, &GridConfig::default()).unwrap()
    }

    #[test]
    fn single_cell_boundary() {
        let b = Bitmap::from_cells([(0, 0)].into_iter(), 2);
        let c = trace_boundary(&b, 0).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.vertices()[0], Point2::new(-0.5, -0.5));
        assert_eq!(c.vertices()[1], Point2::new(0.5, -0.5));
        assert_eq!(curve_orientation(&c, 1e-12).unwrap(), Orientation::Positive);
        assert_eq!(c.twice_signed_area(), 2.0);
    }

    #[test]
    fn domino_keeps_lattice_vertices() {
        let b = Bitmap::from_cells([(0, 0), (1, 0)].into_iter(), 2);
        let c = trace_boundary(&b, 1).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.length(), 3.0);
    }

    #[test]
    fn pinch_and_holes_rejected() {
        let pinch = Bitmap::from_cells([(0, 0), (1, 1)].into_iter(), 2);
        assert!(matches!(trace_boundary(&pinch, 0), Err(GridError::NotADisc(_))));
        let ring = Bitmap::from_cells((-1..=1).flat_map(|k| (-1..=1).map(move |l| (k, l))).filter(|&c| c != (0, 0)), 2);
        assert!(matches!(trace_boundary(&ring, 0), Err(GridError::NotADisc(_))));
    }

    #[test]
    fn single_cell_disc() {
        let g = GridContinuum::new(0, [(0, 0)]).unwrap();
        let d0 = disc(&g, 0);
        assert_eq!(d0.cell_count(), 9);
        assert_eq!(d0.boundary().len(), 12);
        let d1 = disc(&g, 1);
        assert!(d0.contains_region(&d1));
        assert!(!d1.contains_region(&d0));
        assert!(d0.boundary_distance_to_source() <= std::f64::consts::SQRT_2 + 1e-12);
        assert!(d1.boundary_distance_to_source() <= std::f64::consts::SQRT_2 * 0.5 + 1e-12);
    }

    #[test]
    fn c_shape_pocket() {
        // A C opening to the right: its mouth is one cell wide, so the cover
        // closes it and the pocket must be filled, while at a finer exponent
        // the mouth stays open and nothing is filled.
        let cells = [(0, 0), (0, 1), (0, 2), (1, 0), (2, 0), (1, 2), (2, 2), (0, -1), (0, 3)];
        let g = GridContinuum::admissible(0, cells).unwrap();
        let d = disc(&g, 0);
        assert!(d.contains_cell((1, 1)));
        let fine = disc(&g, 2);
        // Cell at the pocket's center, exponent 2: (1, 1) * 4.
        assert!(!fine.contains_cell((4, 4)));
        assert!(curve_orientation(fine.boundary(), 1e-12).unwrap() == Orientation::Positive);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = GridContinuum::new(2, [(0, 0), (1, 1)]).unwrap();
        assert!(matches!(build_disc(&g, 3, &GridConfig::default()), Err(GridError::Inadmissible(_))));
        let g = GridContinuum::new(2, [(0, 0)]).unwrap();
        assert!(matches!(build_disc(&g, 1, &GridConfig::default()), Err(GridError::ExponentBelowBase { .. })));
        assert!(matches!(
            build_disc(&g, 25, &GridConfig::default()),
            Err(GridError::DepthLimitExceeded { requested: 25, limit: 24 })
        ));
        let small = GridConfig { max_cells: 100, ..GridConfig::default() };
        assert!(matches!(build_disc(&g, 8, &small), Err(GridError::GridTooLarge { .. })));
    }
}
