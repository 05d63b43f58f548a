//! Planar primitives: points, oriented points, simple polygons and bearings.
//!
//! A [`SimplePolygon`] can only be obtained through [`validate_polygon`], so
//! every value of that type is closed, non-self-intersecting and stored in
//! counter-clockwise order.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};
use std::path::Path;

use crate::error::{Error, Result};

/// Angles closer than this (radians) compare equal.
pub const ANGLE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (other - self).norm()
    }

    /// Direction of the vector, in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    pub fn rotated(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// A position with a heading, heading kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedPoint {
    pub position: Point,
    heading: f64,
}

impl OrientedPoint {
    pub fn new(position: Point, heading: f64) -> Self {
        OrientedPoint {
            position,
            heading: normalize_angle(heading),
        }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }
}

/// Maps any finite angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Counter-clockwise angle from `origin`'s heading to the ray towards `target`.
pub fn relative_bearing(origin: OrientedPoint, target: Point) -> Result<f64> {
    let d = target - origin.position;
    if d.x == 0.0 && d.y == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(normalize_angle(d.y.atan2(d.x) - origin.heading))
}

/// Shoelace signed area; positive for counter-clockwise chains.
pub fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += points[i].cross(points[(i + 1) % n]);
    }
    acc / 2.0
}

/// Closed-chain length including the implicit closing edge.
pub fn perimeter(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| points[i].distance(points[(i + 1) % n]))
        .sum()
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, touching and collinear overlap included.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// True when edges `a→b` and `b→c` overlap beyond their shared vertex `b`.
fn folds_back(a: Point, b: Point, c: Point) -> bool {
    orient(a, b, c) == 0.0 && (a - b).dot(c - b) > 0.0
}

/// First pair of intersecting edges of a closed chain, if any.
///
/// Edge `i` runs from vertex `i` to vertex `i + 1 (mod n)`.
pub fn find_self_intersection(points: &[Point]) -> Option<(usize, usize)> {
    let n = points.len();
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        for j in (i + 1)..n {
            let (c, d) = (points[j], points[(j + 1) % n]);
            if j == i + 1 {
                if folds_back(a, b, d) {
                    return Some((i, j));
                }
            } else if i == 0 && j == n - 1 {
                if folds_back(c, a, b) {
                    return Some((i, j));
                }
            } else if segments_intersect(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Ordered, closed, non-self-intersecting, counter-clockwise vertex chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplePolygon {
    vertices: Vec<Point>,
}

impl SimplePolygon {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        perimeter(&self.vertices)
    }
}

/// Checks that `points` form a simple polygon and returns it in CCW order.
///
/// A clockwise input is reversed while keeping vertex 0 in place.
pub fn validate_polygon(points: &[Point]) -> Result<SimplePolygon> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    if let Some(index) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFiniteCoordinate { index });
    }
    for i in 0..n {
        if points[i] == points[(i + 1) % n] {
            return Err(Error::DegenerateEdge { index: i });
        }
    }
    if let Some((first, second)) = find_self_intersection(points) {
        return Err(Error::SelfIntersecting { first, second });
    }
    if signed_area(points) == 0.0 {
        return Err(Error::ZeroArea);
    }
    Ok(ensure_ccw(SimplePolygon {
        vertices: points.to_vec(),
    }))
}

/// Reverses a clockwise polygon, keeping the vertex at index 0 first.
pub fn ensure_ccw(polygon: SimplePolygon) -> SimplePolygon {
    let mut vertices = polygon.vertices;
    orient_ccw(&mut vertices);
    SimplePolygon { vertices }
}

/// In-place version of [`ensure_ccw`] for raw chains.
pub fn orient_ccw(points: &mut [Point]) {
    if signed_area(points) < 0.0 && points.len() > 1 {
        points[1..].reverse();
    }
}

/// Parses the `.poly` text format: a vertex count line followed by `x y` lines.
pub fn parse_poly(text: &str) -> Result<Vec<Point>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or(Error::PolyParse {
        line: 1,
        msg: "missing vertex count".into(),
    })?;
    let n: usize = header.parse().map_err(|_| Error::PolyParse {
        line,
        msg: format!("bad vertex count {header:?}"),
    })?;
    let mut points = Vec::with_capacity(n);
    for (line, l) in lines {
        if points.len() == n {
            return Err(Error::PolyParse {
                line,
                msg: format!("more than {n} vertices"),
            });
        }
        let mut fields = l.split_whitespace();
        let mut coord = |name: &str| -> Result<f64> {
            let tok = fields.next().ok_or_else(|| Error::PolyParse {
                line,
                msg: format!("missing {name} coordinate"),
            })?;
            tok.parse().map_err(|_| Error::PolyParse {
                line,
                msg: format!("bad {name} coordinate {tok:?}"),
            })
        };
        let x = coord("x")?;
        let y = coord("y")?;
        if fields.next().is_some() {
            return Err(Error::PolyParse {
                line,
                msg: "trailing fields".into(),
            });
        }
        points.push(Point::new(x, y));
    }
    if points.len() != n {
        return Err(Error::PolyParse {
            line: text.lines().count(),
            msg: format!("expected {n} vertices, found {}", points.len()),
        });
    }
    Ok(points)
}

pub fn format_poly(points: &[Point]) -> String {
    let mut out = String::with_capacity(points.len() * 24 + 8);
    let _ = writeln!(out, "{}", points.len());
    for p in points {
        let _ = writeln!(out, "{} {}", p.x, p.y);
    }
    out
}

pub fn read_poly_file(path: &Path) -> Result<Vec<Point>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_poly(&text)
}

pub fn write_poly_file(path: &Path, points: &[Point]) -> Result<()> {
    std::fs::write(path, format_poly(points)).map_err(|e| Error::io(path, e))
}
