//! Diagnostic figures.

use std::fmt::Write as _;
use std::path::Path;

use planefix::{GridContinuum, Point2, PolyCurve};

use crate::report::fmt_sig12;
use crate::CliError;

/// Target width of the drawing in pixels.
const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;

#[derive(Debug, Default)]
pub struct Figure {
    /// Closed cell squares `(lo, hi)`.
    cells: Vec<(Point2, Point2)>,
    curves: Vec<(PolyCurve, &'static str)>,
    segments: Vec<(Point2, Point2, &'static str)>,
    markers: Vec<(Point2, &'static str)>,
}

impl Figure {
    pub fn continuum(&mut self, g: &GridContinuum) {
        self.cells.extend(g.cells().iter().map(|&c| g.cell_square(c)));
    }

    pub fn curve(&mut self, c: &PolyCurve, color: &'static str) {
        self.curves.push((c.clone(), color));
    }

    pub fn segment(&mut self, a: Point2, b: Point2, color: &'static str) {
        self.segments.push((a, b, color));
    }

    pub fn marker(&mut self, p: Point2, color: &'static str) {
        self.markers.push((p, color));
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.curves.is_empty() && self.segments.is_empty() && self.markers.is_empty()
    }

    fn points(&self) -> impl Iterator<Item = Point2> + '_ {
        self.cells
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .chain(self.curves.iter().flat_map(|(c, _)| c.vertices().iter().copied()))
            .chain(self.segments.iter().flat_map(|&(a, b, _)| [a, b]))
            .chain(self.markers.iter().map(|&(p, _)| p))
    }

    pub fn render(&self) -> Result<String, CliError> {
        if self.is_empty() {
            return Err(CliError::Input("nothing to draw: the report carries no geometry".into()));
        }
        let first = self.points().next().expect("non-empty figure");
        let (lo, hi) = self.points().fold((first, first), |(lo, hi), p| {
            (Point2::new(lo.x.min(p.x), lo.y.min(p.y)), Point2::new(hi.x.max(p.x), hi.y.max(p.y)))
        });
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
        let scale = (WIDTH - 2.0 * MARGIN) / extent;
        let width = (hi.x - lo.x) * scale + 2.0 * MARGIN;
        let height = (hi.y - lo.y) * scale + 2.0 * MARGIN;
        let px = |p: Point2| ((p.x - lo.x) * scale + MARGIN, (hi.y - p.y) * scale + MARGIN);
        let f = |v: f64| fmt_sig12(v);

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            "<!-- scale: 1 plane unit = {} px; plane point ({}, {}) is at pixel ({MARGIN}, {MARGIN}); y grows upward in the plane, downward in pixels -->",
            f(scale),
            f(lo.x),
            f(hi.y)
        );
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            f(width),
            f(height),
            f(width),
            f(height)
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        if !self.cells.is_empty() {
            let _ = writeln!(s, r##"<g id="continuum" fill="#9a9a9a" stroke="none">"##);
            for &(a, b) in &self.cells {
                let (x, y) = px(Point2::new(a.x, b.y));
                let _ = writeln!(
                    s,
                    r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                    f(x),
                    f(y),
                    f((b.x - a.x) * scale),
                    f((b.y - a.y) * scale)
                );
            }
            let _ = writeln!(s, "</g>");
        }
        for (c, color) in &self.curves {
            let pts: Vec<String> = c.vertices().iter().map(|&v| px(v)).map(|(x, y)| format!("{},{}", f(x), f(y))).collect();
            let tag = if c.is_closed() { "polygon" } else { "polyline" };
            let _ = writeln!(s, r#"<{tag} class="curve" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        }
        for &(a, b, color) in &self.segments {
            let ((x1, y1), (x2, y2)) = (px(a), px(b));
            let _ = writeln!(
                s,
                r#"<line class="segment" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="1"/>"#,
                f(x1),
                f(y1),
                f(x2),
                f(y2)
            );
        }
        for &(p, color) in &self.markers {
            let (x, y) = px(p);
            let _ = writeln!(s, r#"<circle class="fixed-point" cx="{}" cy="{}" r="4" fill="{color}"/>"#, f(x), f(y));
        }
        let _ = writeln!(s, "</svg>");
        Ok(s)
    }

    /// Renders first, so an empty figure leaves no file behind.
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = self.render()?;
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}
