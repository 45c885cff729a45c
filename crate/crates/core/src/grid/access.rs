use serde::Serialize;

use super::{cells_meeting, Cell, DiscApproximation, GridContinuum, GridError};
use crate::geometry::{dyadic, Point2, Segment};

/// Straight segment from a boundary site `b` of `B_m` to the nearest point
/// `x_b` of the continuum inside the cell of `B_m` adjacent to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccessSegment {
    pub site: Point2,
    pub target: Point2,
    /// Inner cell (exponent `m`) whose closed square contains the segment.
    pub cell: Cell,
    /// Index of the boundary edge carrying the site.
    pub edge: usize,
}

impl AccessSegment {
    pub fn segment(&self) -> Segment {
        Segment::new(self.site, self.target)
    }
}

/// Access segments for `sites`, each of which must lie on the boundary of
/// `d` within `on_tol`.
pub fn access_segments(d: &DiscApproximation, sites: &[Point2], on_tol: f64) -> Result<Vec<AccessSegment>, GridError> {
    let curve = d.boundary();
    let m = d.exponent();
    let h = d.cell_size();
    let scale = (1u64 << m) as f64;
    sites
        .iter()
        .map(|&b| {
            // A site on a vertex belongs to the edge leaving it.
            let edge = (0..curve.segment_count())
                .find(|&i| curve.vertices()[i] == b)
                .or_else(|| (0..curve.segment_count()).find(|&i| curve.segment(i).distance_to(b) <= on_tol))
                .ok_or(GridError::SiteOffBoundary(b))?;
            let s = curve.segment(edge);
            let dir = (s.b - s.a) * (1.0 / s.length());
            let inward = Point2::new(-dir.y, dir.x);
            let center = s.a.midpoint(s.b) + inward * (h / 2.0);
            let cell = ((center.x * scale).round() as i64, (center.y * scale).round() as i64);
            debug_assert!(d.contains_cell(cell));
            let target = nearest_in_cell(d.source(), m, cell, b).ok_or(GridError::SiteOffBoundary(b))?;
            Ok(AccessSegment { site: b, target, cell, edge })
        })
        .collect()
}

/// Nearest point to `p` of `K ∩ Q`, `Q` the closed cell `cell` of exponent
/// `m >= g.exponent()`. Ties go to the lexicographically smallest point.
/// `None` when the cell misses the continuum.
pub fn nearest_in_cell(g: &GridContinuum, m: u32, cell: Cell, p: Point2) -> Option<Point2> {
    let w = 1i64 << (m - g.exponent());
    let (qx, qy) = ((2 * cell.0 - 1, 2 * cell.0 + 1), (2 * cell.1 - 1, 2 * cell.1 + 1));
    let e = m + 1;
    let mut best: Option<(f64, Point2)> = None;
    for k in cells_meeting(qx.0, qx.1, w, true) {
        for l in cells_meeting(qy.0, qy.1, w, true) {
            if !g.contains_cell((k, l)) {
                continue;
            }
            // Rectangle K-cell ∩ Q in half-cell units of exponent m.
            let x0 = qx.0.max((2 * k - 1) * w);
            let x1 = qx.1.min((2 * k + 1) * w);
            let y0 = qy.0.max((2 * l - 1) * w);
            let y1 = qy.1.min((2 * l + 1) * w);
            let c = Point2::new(
                p.x.clamp(dyadic(x0, e), dyadic(x1, e)),
                p.y.clamp(dyadic(y0, e), dyadic(y1, e)),
            );
            let d = c.dist(p);
            let better = match best {
                None => true,
                Some((bd, bp)) => d < bd || (d == bd && c.lex_cmp(&bp).is_lt()),
            };
            if better {
                best = Some((d, c));
            }
        }
    }
    best.map(|(_, c)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_disc, GridConfig};

    #[test]
    fn corner_cell_meets_at_a_point() {
        // K is the unit cell; at exponent 0 the corner cell (1, 1) touches it
        // only at (0.5, 0.5).
        let g = GridContinuum::new(0, [(0, 0)]).unwrap();
        let d = build_disc(&g, 0, &GridConfig::default()).unwrap();
        let site = Point2::new(1.5, 1.5);
        let a = access_segments(&d, &[site], 1e-9).unwrap();
        assert_eq!(a[0].target, Point2::new(0.5, 0.5));
    }

    #[test]
    fn edge_site_projects() {
        let g = GridContinuum::new(0, [(0, 0)]).unwrap();
        let d = build_disc(&g, 0, &GridConfig::default()).unwrap();
        let a = access_segments(&d, &[Point2::new(0.25, -1.5)], 1e-9).unwrap();
        assert_eq!(a[0].cell, (0, -1));
        assert_eq!(a[0].target, Point2::new(0.25, -0.5));
        assert_eq!(a[0].segment().length(), 1.0);
    }

    #[test]
    fn off_boundary_site() {
        let g = GridContinuum::new(0, [(0, 0)]).unwrap();
        let d = build_disc(&g, 0, &GridConfig::default()).unwrap();
        assert_eq!(
            access_segments(&d, &[Point2::new(0.0, 0.0)], 1e-9),
            Err(GridError::SiteOffBoundary(Point2::new(0.0, 0.0)))
        );
    }

    #[test]
    fn site_in_continuum_is_its_own_target() {
        let g = GridContinuum::new(1, [(0, 0)]).unwrap();
        let p = Point2::new(0.1, 0.25);
        assert_eq!(nearest_in_cell(&g, 2, (0, 1), p), Some(p));
        assert_eq!(nearest_in_cell(&g, 2, (5, 5), p), None);
    }

    #[test]
    fn ties_break_lexicographically() {
        // K ∩ Q is two vertical edges equidistant from p: the left one wins.
        let g = GridContinuum::new(0, [(0, 0), (2, 0)]).unwrap();
        let p = Point2::new(1.0, 0.2);
        assert_eq!(nearest_in_cell(&g, 0, (1, 0), p), Some(Point2::new(0.5, 0.2)));
    }
}
