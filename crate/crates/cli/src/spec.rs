//! Parsers for the map, continuum, curve and number arguments.

use std::sync::Arc;

use planefix::grid::parse_grid;
use planefix::maps::{parse_angle, Composition, FlowMap, Homeomorphism, Inverse, SegmentShear, SquareTwist};
use planefix::{AffineMap, GridContinuum, Point2, PolyCurve};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::CliError;

pub type Map = Arc<dyn Homeomorphism>;

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    let v: f64 = s.trim().parse().map_err(|_| input(format!("{what}: cannot parse {s:?} as a number")))?;
    if !v.is_finite() {
        return Err(input(format!("{what}: {s:?} is not finite")));
    }
    Ok(v)
}

fn numbers(parts: &[&str], what: &str) -> Result<Vec<f64>, CliError> {
    parts.iter().map(|p| number(p, what)).collect()
}

/// Optional trailing `cx:cy`.
fn center(rest: &[f64], what: &str) -> Result<Point2, CliError> {
    match rest {
        [] => Ok(Point2::ORIGIN),
        [x, y] => Ok(Point2::new(*x, *y)),
        _ => Err(input(format!("{what}: center needs two coordinates"))),
    }
}

fn map_part(spec: &str) -> Result<Map, CliError> {
    if let Some(rest) = spec.strip_prefix("inv:") {
        return Ok(Arc::new(Inverse(map_part(rest)?)));
    }
    let mut fields = spec.split(':');
    let kind = fields.next().unwrap_or_default();
    let args: Vec<&str> = fields.collect();
    let bad = |e: planefix::maps::MapError| input(format!("{kind}: {e}"));
    let map: Map = match kind {
        "identity" if args.is_empty() => Arc::new(AffineMap::identity()),
        "rot" if !args.is_empty() => {
            let angle = parse_angle(args[0]).map_err(bad)?;
            Arc::new(AffineMap::rotation(angle, center(&numbers(&args[1..], kind)?, kind)?))
        }
        "pirot" => Arc::new(AffineMap::half_turn(center(&numbers(&args, kind)?, kind)?)),
        "trans" if args.len() == 2 => {
            let v = numbers(&args, kind)?;
            Arc::new(AffineMap::translation(v[0], v[1]))
        }
        "scale" if !args.is_empty() => {
            let v = numbers(&args, kind)?;
            Arc::new(AffineMap::scaling(v[0], center(&v[1..], kind)?).map_err(bad)?)
        }
        "linear" if args.len() == 4 => {
            let v = numbers(&args, kind)?;
            Arc::new(AffineMap::linear(v[0], v[1], v[2], v[3]).map_err(bad)?)
        }
        "flow" if args == ["bistable"] => Arc::new(FlowMap::bistable()),
        "shear" => {
            let v = match numbers(&args, kind)?[..] {
                [] => [1.5, 0.1],
                [a, s] => [a, s],
                _ => return Err(input("shear: expected shear[:half_length:strength]")),
            };
            Arc::new(SegmentShear::new(v[0], v[1]).map_err(bad)?)
        }
        "twist" if args.len() >= 2 => {
            let v = numbers(&args, kind)?;
            let half = v.get(2).copied().unwrap_or(0.625);
            Arc::new(SquareTwist::new(center(&v[3.min(v.len())..], kind)?, half, v[0], v[1]).map_err(bad)?)
        }
        _ => return Err(input(format!("unknown map {spec:?}"))),
    };
    Ok(map)
}

/// Comma-separated parts, applied left to right.
pub fn parse_map(spec: &str) -> Result<Map, CliError> {
    let parts: Vec<Map> = spec.split(',').map(|p| map_part(p.trim())).collect::<Result<_, _>>()?;
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().expect("one part"));
    }
    Ok(Arc::new(Composition::new(parts).map_err(|e| input(e.to_string()))?))
}

pub fn parse_continuum(spec: &str, seed: u64) -> Result<GridContinuum, CliError> {
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        return parse_grid(&text).map_err(|e| input(format!("{path}: {e}")));
    }
    let Some(name) = spec.strip_prefix("builtin:") else {
        return Err(input(format!("continuum must be builtin:<name> or file:<path>, got {spec:?}")));
    };
    let grid = |r: Result<GridContinuum, planefix::GridError>| r.map_err(|e| input(e.to_string()));
    let fields: Vec<&str> = name.split(':').collect();
    match fields[..] {
        ["disc5"] => grid(GridContinuum::block(2, -2..=2, -2..=2)),
        ["segment"] => grid(GridContinuum::horizontal_segment(3, -1.0, 1.0)),
        ["segment15"] => grid(GridContinuum::horizontal_segment(3, -1.5, 1.5)),
        ["cross"] => grid(GridContinuum::cross(2, 3)),
        ["cell"] => grid(GridContinuum::new(0, [(0, 0)])),
        ["blob", cells, ref rest @ ..] if rest.len() <= 1 => {
            let cells: usize = cells.parse().map_err(|_| input(format!("blob: bad cell count {cells:?}")))?;
            if !(1..=100_000).contains(&cells) {
                return Err(input("blob: cell count must be in 1..=100000"));
            }
            let exponent = match rest.first() {
                Some(e) => e.parse().map_err(|_| input(format!("blob: bad exponent {e:?}")))?,
                None => 3,
            };
            if exponent > planefix::grid::MAX_DEPTH {
                return Err(input(format!("blob: exponent above {}", planefix::grid::MAX_DEPTH)));
            }
            Ok(GridContinuum::random(&mut ChaCha8Rng::seed_from_u64(seed), exponent, cells))
        }
        _ => Err(input(format!("unknown builtin continuum {name:?}"))),
    }
}

fn point(s: &str) -> Result<Point2, CliError> {
    let v = numbers(&s.split(',').collect::<Vec<_>>(), "point")?;
    match v[..] {
        [x, y] => Ok(Point2::new(x, y)),
        _ => Err(input(format!("point {s:?} needs two coordinates x,y"))),
    }
}

/// Semicolon-separated `x,y` pairs.
pub fn parse_points(spec: &str) -> Result<Vec<Point2>, CliError> {
    spec.split(';').filter(|p| !p.trim().is_empty()).map(point).collect()
}

pub fn parse_curve(spec: &str) -> Result<PolyCurve, CliError> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let geometry = |r: Result<PolyCurve, planefix::geometry::GeometryError>| r.map_err(|e| input(format!("{kind}: {e}")));
    let curve = match kind {
        "poly" => geometry(PolyCurve::closed(parse_points(rest)?))?,
        _ => {
            let v = numbers(&rest.split(':').collect::<Vec<_>>(), kind)?;
            match (kind, v.len()) {
                ("circle", 2 | 4) => {
                    if !(v[0] > 0.0) || v[1] < 3.0 || v[1].fract() != 0.0 {
                        return Err(input("circle: needs radius > 0 and at least 3 vertices"));
                    }
                    geometry(PolyCurve::circle(center(&v[2..], kind)?, v[0], v[1] as usize))?
                }
                ("square", 1 | 3) => {
                    if !(v[0] > 0.0) {
                        return Err(input("square: side must be positive"));
                    }
                    let c = center(&v[1..], kind)?;
                    let h = Point2::new(v[0] / 2.0, v[0] / 2.0);
                    geometry(PolyCurve::rectangle(c - h, c + h))?
                }
                ("rect", 4) => {
                    if !(v[2] > v[0] && v[3] > v[1]) {
                        return Err(input("rect: needs x0 < x1 and y0 < y1"));
                    }
                    geometry(PolyCurve::rectangle(Point2::new(v[0], v[1]), Point2::new(v[2], v[3])))?
                }
                _ => return Err(input(format!("unknown curve {spec:?}"))),
            }
        }
    };
    curve.check_simple(1e-12).map_err(|e| input(format!("curve is not simple: {e}")))?;
    Ok(curve)
}

/// A positive dyadic rational: `2^-k`, `a/2^k` written as `a/b`, or a
/// decimal such as `0.375`.
pub fn parse_dyadic(s: &str) -> Result<f64, CliError> {
    let bad = || input(format!("{s:?} is not a positive dyadic rational"));
    let s = s.trim();
    let v = if let Some(e) = s.strip_prefix("2^") {
        let e: i32 = e.parse().map_err(|_| bad())?;
        2f64.powi(e)
    } else if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if !b.is_power_of_two() {
            return Err(bad());
        }
        a as f64 / b as f64
    } else {
        if !decimal_is_dyadic(s) {
            return Err(bad());
        }
        s.parse().map_err(|_| bad())?
    };
    if !(v > 0.0 && v.is_finite()) {
        return Err(bad());
    }
    Ok(v)
}

/// `N / 10^d` is dyadic exactly when `5^d` divides `N`.
fn decimal_is_dyadic(s: &str) -> bool {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits = format!("{int}{frac}");
    if frac.len() > 25 || digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return false;
    }
    match digits.parse::<u128>() {
        Ok(n) => n % 5u128.pow(frac.len() as u32) == 0,
        Err(_) => false,
    }
}
