//! Continua represented as unions of closed dyadic cells.
//!
//! At exponent `n` the plane is tiled by closed squares of side `2^-n`
//! centered at `(k / 2^n, l / 2^n)`. A [`GridContinuum`] is a finite set of
//! such cells; its point set is the union of the closed squares.
//!
//! Integer arithmetic is done in "half-cell units" `2^-(m+1)` of the finest
//! exponent `m` involved, where cell `j` spans `[2j - 1, 2j + 1]` and every
//! coarser cell boundary is an integer. Converting back to `f64` goes
//! through [`dyadic`](crate::geometry::dyadic) and is exact.

mod access;
mod disc;
mod format;

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{dyadic, Point2};

pub use access::{access_segments, nearest_in_cell, AccessSegment};
pub use disc::{build_disc, frontier, trace_boundary, DiscApproximation};
pub use format::{parse_grid, write_grid};

/// Largest exponent for which all the dyadic arithmetic stays exact.
pub const MAX_DEPTH: u32 = 24;

/// Bound on `|k|` for cell indices at any exponent.
const MAX_INDEX: i64 = 1 << 28;

pub type Cell = (i64, i64);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("continuum has no cells")]
    Empty,
    #[error("exponent {requested} exceeds the depth limit {limit}")]
    DepthLimitExceeded { requested: u32, limit: u32 },
    #[error("exponent {requested} is below the continuum's exponent {base}")]
    ExponentBelowBase { requested: u32, base: u32 },
    #[error("cell index out of range at exponent {exponent}")]
    IndexOutOfRange { exponent: u32 },
    #[error("grid of {cells} cells exceeds the configured limit {limit}")]
    GridTooLarge { cells: usize, limit: usize },
    #[error("continuum is not admissible: {0}")]
    Inadmissible(ValidationReport),
    #[error("region is not a topological disc: {0}")]
    NotADisc(String),
    #[error("site {0} is not on the disc boundary")]
    SiteOffBoundary(Point2),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub depth_limit: u32,
    /// Largest dense bitmap (cells) a single construction may allocate.
    pub max_cells: usize,
    pub on_tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { depth_limit: MAX_DEPTH, max_cells: 1 << 26, on_tol: crate::geometry::DEFAULT_ON_TOL }
    }
}

/// A connected, non-separating union of closed cells at one exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridContinuum {
    exponent: u32,
    cells: BTreeSet<Cell>,
}

/// Result of [`validate_continuum`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub cell_count: usize,
    /// Number of 4-connected components of the cells.
    pub components: usize,
    /// Number of 4-connected components of the complement inside the box
    /// padded by two cells; `1` means non-separating.
    pub complement_components: usize,
}

impl ValidationReport {
    pub fn connected(&self) -> bool {
        self.components == 1
    }

    pub fn non_separating(&self) -> bool {
        self.complement_components == 1
    }

    pub fn admissible(&self) -> bool {
        self.cell_count > 0 && self.connected() && self.non_separating()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} cells, {} component(s), {} complement component(s)",
            self.cell_count, self.components, self.complement_components
        )
    }
}

impl GridContinuum {
    /// Builds a cell set without checking admissibility (see
    /// [`GridContinuum::admissible`]).
    pub fn new(exponent: u32, cells: impl IntoIterator<Item = Cell>) -> Result<Self, GridError> {
        if exponent > MAX_DEPTH {
            return Err(GridError::DepthLimitExceeded { requested: exponent, limit: MAX_DEPTH });
        }
        let cells: BTreeSet<Cell> = cells.into_iter().collect();
        if cells.is_empty() {
            return Err(GridError::Empty);
        }
        if cells.iter().any(|&(k, l)| k.abs() >= MAX_INDEX || l.abs() >= MAX_INDEX) {
            return Err(GridError::IndexOutOfRange { exponent });
        }
        Ok(Self { exponent, cells })
    }

    /// Like [`GridContinuum::new`] but rejects inadmissible cell sets.
    pub fn admissible(exponent: u32, cells: impl IntoIterator<Item = Cell>) -> Result<Self, GridError> {
        let g = Self::new(exponent, cells)?;
        let report = validate_continuum(&g);
        if !report.admissible() {
            return Err(GridError::Inadmissible(report));
        }
        Ok(g)
    }

    /// Rectangle of cells `k0..=k1` by `l0..=l1`.
    pub fn block(exponent: u32, k: RangeInclusive<i64>, l: RangeInclusive<i64>) -> Result<Self, GridError> {
        Self::new(exponent, k.flat_map(|k| l.clone().map(move |l| (k, l))))
    }

    /// One row of cells thickening the segment `[x0, x1] × {0}`.
    pub fn horizontal_segment(exponent: u32, x0: f64, x1: f64) -> Result<Self, GridError> {
        let scale = (1u64 << exponent) as f64;
        let (k0, k1) = ((x0 * scale).round() as i64, (x1 * scale).round() as i64);
        Self::block(exponent, k0.min(k1)..=k0.max(k1), 0..=0)
    }

    /// Plus-shaped set symmetric under quarter turns about the origin.
    pub fn cross(exponent: u32, arm: i64) -> Result<Self, GridError> {
        let cells = (-arm..=arm).map(|k| (k, 0)).chain((-arm..=arm).filter(|&l| l != 0).map(|l| (0, l)));
        Self::new(exponent, cells)
    }

    /// Random 4-connected growth from the origin, holes filled afterwards.
    ///
    /// Returns at least `target` cells; hole filling can add a few more.
    pub fn random<R: Rng>(rng: &mut R, exponent: u32, target: usize) -> Self {
        let mut cells: BTreeSet<Cell> = BTreeSet::new();
        let mut order = vec![(0i64, 0i64)];
        cells.insert((0, 0));
        while cells.len() < target.max(1) {
            let (k, l) = order[rng.gen_range(0..order.len())];
            let (dk, dl) = [(1, 0), (-1, 0), (0, 1), (0, -1)][rng.gen_range(0..4)];
            let c = (k + dk, l + dl);
            if cells.insert(c) {
                order.push(c);
            }
        }
        let g = Self { exponent, cells };
        g.with_holes_filled()
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains_cell(&self, c: Cell) -> bool {
        self.cells.contains(&c)
    }

    pub fn cell_size(&self) -> f64 {
        dyadic(1, self.exponent)
    }

    /// Closed square of cell `c`: `(lower-left, upper-right)`.
    pub fn cell_square(&self, c: Cell) -> (Point2, Point2) {
        cell_square(c, self.exponent)
    }

    /// Inclusive cell index bounds.
    pub fn bounds(&self) -> (Cell, Cell) {
        bounds(self.cells.iter().copied())
    }

    /// Whether `p` lies in the union of closed cells.
    pub fn contains_point(&self, p: Point2) -> bool {
        cells_containing(p, self.exponent).iter().any(|c| self.cells.contains(c))
    }

    /// Euclidean distance from `p` to the point set.
    pub fn distance_to(&self, p: Point2) -> f64 {
        if self.contains_point(p) {
            return 0.0;
        }
        self.cells
            .iter()
            .map(|&c| {
                let (lo, hi) = self.cell_square(c);
                let dx = (lo.x - p.x).max(p.x - hi.x).max(0.0);
                let dy = (lo.y - p.y).max(p.y - hi.y).max(0.0);
                dx.hypot(dy)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Cells of exponent `m` whose closed squares meet the point set.
    pub fn cover(&self, m: u32) -> Result<BTreeSet<Cell>, GridError> {
        self.cells_at(m, true)
    }

    fn cells_at(&self, m: u32, closed: bool) -> Result<BTreeSet<Cell>, GridError> {
        if m < self.exponent {
            return Err(GridError::ExponentBelowBase { requested: m, base: self.exponent });
        }
        if m > MAX_DEPTH {
            return Err(GridError::DepthLimitExceeded { requested: m, limit: MAX_DEPTH });
        }
        let s = 1i64 << (m - self.exponent);
        let mut out = BTreeSet::new();
        for &(k, l) in &self.cells {
            let xs = cells_meeting((2 * k - 1) * s, (2 * k + 1) * s, 1, closed);
            let ys = cells_meeting((2 * l - 1) * s, (2 * l + 1) * s, 1, closed);
            for i in xs {
                for j in ys.clone() {
                    out.insert((i, j));
                }
            }
        }
        if out.iter().any(|&(k, l)| k.abs() >= MAX_INDEX || l.abs() >= MAX_INDEX) {
            return Err(GridError::IndexOutOfRange { exponent: m });
        }
        Ok(out)
    }

    fn with_holes_filled(self) -> Self {
        let bitmap = Bitmap::from_cells(self.cells.iter().copied(), 2);
        let filled = bitmap.fill_holes();
        Self { exponent: self.exponent, cells: filled.cells().collect() }
    }
}

/// Re-expresses `g` at the finer exponent `m`: the cells whose squares
/// overlap the point set with positive area.
///
/// The centered tilings of different exponents are not nested, so the
/// result covers a slightly larger point set than `g` whenever `m > g.n`.
/// It is the identity for `m = g.n` and preserves admissibility.
pub fn refine(g: &GridContinuum, m: u32) -> Result<GridContinuum, GridError> {
    let cells = g.cells_at(m, false)?;
    Ok(GridContinuum { exponent: m, cells })
}

/// Connectivity and non-separation of a cell set.
pub fn validate_continuum(g: &GridContinuum) -> ValidationReport {
    let bitmap = Bitmap::from_cells(g.cells.iter().copied(), 2);
    let (_, components) = bitmap.label(true);
    let (_, complement_components) = bitmap.label(false);
    ValidationReport { cell_count: g.cells.len(), components, complement_components }
}

/// Range of cells `i` (spanning `[(2i-1)w, (2i+1)w]`) that meet `[a, b]`:
/// any contact when `closed`, positive-length overlap otherwise.
pub(crate) fn cells_meeting(a: i64, b: i64, w: i64, closed: bool) -> RangeInclusive<i64> {
    let two_w = 2 * w;
    if closed {
        let hi = (b + w).div_euclid(two_w);
        let lo = -(-(a - w)).div_euclid(two_w);
        lo..=hi
    } else {
        let hi = -(-(b + w)).div_euclid(two_w) - 1;
        let lo = (a - w).div_euclid(two_w) + 1;
        lo..=hi
    }
}

pub(crate) fn cell_square(c: Cell, exponent: u32) -> (Point2, Point2) {
    let e = exponent + 1;
    (
        Point2::new(dyadic(2 * c.0 - 1, e), dyadic(2 * c.1 - 1, e)),
        Point2::new(dyadic(2 * c.0 + 1, e), dyadic(2 * c.1 + 1, e)),
    )
}

/// Cells (one to four) whose closed squares contain `p`.
pub(crate) fn cells_containing(p: Point2, exponent: u32) -> Vec<Cell> {
    let scale = (1u64 << exponent) as f64;
    let axis = |v: f64| -> Vec<i64> {
        let s = v * scale;
        let r = s.round();
        // Exactly on a cell boundary (half-integer): both neighbours.
        if (s - r).abs() == 0.5 {
            vec![(s - 0.5) as i64, (s + 0.5) as i64]
        } else {
            vec![r as i64]
        }
    };
    let (xs, ys) = (axis(p.x), axis(p.y));
    let mut out = Vec::with_capacity(4);
    for &i in &xs {
        for &j in &ys {
            out.push((i, j));
        }
    }
    out
}

pub(crate) fn bounds(cells: impl Iterator<Item = Cell>) -> (Cell, Cell) {
    let mut lo = (i64::MAX, i64::MAX);
    let mut hi = (i64::MIN, i64::MIN);
    for (k, l) in cells {
        lo = (lo.0.min(k), lo.1.min(l));
        hi = (hi.0.max(k), hi.1.max(l));
    }
    (lo, hi)
}

/// Dense cell bitmap over a rectangle of cell indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    origin: Cell,
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Bitmap {
    /// Bitmap of the cells' bounding box, padded by `pad` empty cells.
    pub fn from_cells(cells: impl Iterator<Item = Cell> + Clone, pad: i64) -> Self {
        let (lo, hi) = bounds(cells.clone());
        let origin = (lo.0 - pad, lo.1 - pad);
        let width = (hi.0 - lo.0 + 1 + 2 * pad) as usize;
        let height = (hi.1 - lo.1 + 1 + 2 * pad) as usize;
        let mut bits = vec![false; width * height];
        for (k, l) in cells {
            bits[(l - origin.1) as usize * width + (k - origin.0) as usize] = true;
        }
        Self { origin, width, height, bits }
    }

    pub fn contains(&self, c: Cell) -> bool {
        let (x, y) = (c.0 - self.origin.0, c.1 - self.origin.1);
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height && self.bits[y as usize * self.width + x as usize]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(move |(i, _)| {
            (self.origin.0 + (i % self.width) as i64, self.origin.1 + (i / self.width) as i64)
        })
    }

    pub fn origin(&self) -> Cell {
        self.origin
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// 4-connected component labels of cells whose bit equals `value`.
    /// Returns per-cell labels (`usize::MAX` for other cells) and the count.
    pub fn label(&self, value: bool) -> (Vec<usize>, usize) {
        let (w, h) = (self.width, self.height);
        let mut labels = vec![usize::MAX; w * h];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..w * h {
            if self.bits[start] != value || labels[start] != usize::MAX {
                continue;
            }
            labels[start] = count;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (x, y) = (i % w, i / w);
                let mut visit = |j: usize| {
                    if self.bits[j] == value && labels[j] == usize::MAX {
                        labels[j] = count;
                        stack.push(j);
                    }
                };
                if x > 0 {
                    visit(i - 1);
                }
                if x + 1 < w {
                    visit(i + 1);
                }
                if y > 0 {
                    visit(i - w);
                }
                if y + 1 < h {
                    visit(i + w);
                }
            }
            count += 1;
        }
        (labels, count)
    }

    /// Sets every empty cell not 4-connected to the frame.
    pub fn fill_holes(&self) -> Bitmap {
        let (labels, _) = self.label(false);
        let outside = labels[0];
        debug_assert!(!self.bits[0], "bitmap must be padded");
        let bits = self.bits.iter().zip(&labels).map(|(&b, &lab)| b || lab != outside).collect();
        Bitmap { bits, ..self.clone() }
    }

    /// Splits the set cells into 4-connected components.
    pub fn components(&self) -> Vec<Vec<Cell>> {
        let (labels, count) = self.label(true);
        let mut out = vec![Vec::new(); count];
        for (i, &lab) in labels.iter().enumerate() {
            if lab != usize::MAX {
                out[lab].push((self.origin.0 + (i % self.width) as i64, self.origin.1 + (i / self.width) as i64));
            }
        }
        out
    }
}
