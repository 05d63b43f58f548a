//! eOPRA-m shape descriptors.
//!
//! Every vertex of a counter-clockwise polygon becomes an oriented point
//! heading along its outgoing edge. For each ordered vertex pair `(i, j)` the
//! descriptor stores the direction sector of `v_j` as seen from `v_i`, and a
//! distance class for `|v_i v_j|` relative to the polygon's mean edge length.
//!
//! Sectors are numbered `0..4m` counter-clockwise from straight ahead. Even
//! ids are the `2m` exact rays at multiples of `π/m`; odd ids are the open
//! wedges between them. Distance class `k` covers ratios in
//! `[2^(k-m), 2^(k-m+1))`, with the outermost classes absorbing the tails.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, perimeter, Point, SimplePolygon, ANGLE_EPS};

/// Default granularity.
pub const DEFAULT_GRANULARITY: u32 = 4;

/// Diagonal entries of both matrices.
pub const SENTINEL: i16 = -1;

// log2 ratios within this of an integer snap up to it
const LOG2_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectorId(pub u32);

impl SectorId {
    pub fn is_linear(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DistClass(pub u32);

pub fn sector_of(m: u32, phi: f64) -> SectorId {
    let phi = normalize_angle(phi);
    let step = PI / f64::from(m);
    let t = phi / step;
    let nearest = t.round();
    let wrap = 2 * m;
    if (phi - nearest * step).abs() <= ANGLE_EPS {
        SectorId(2 * (nearest as u32 % wrap))
    } else {
        SectorId((2 * (t.floor() as u32) + 1) % (2 * wrap))
    }
}

pub fn dist_class_of(m: u32, ratio: f64) -> Result<DistClass> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::NonPositiveRatio(ratio));
    }
    let bin = (ratio.log2() + LOG2_EPS).floor() + f64::from(m);
    Ok(DistClass(bin.clamp(0.0, f64::from(2 * m - 1)) as u32))
}

/// Mean edge length of a closed chain.
pub fn ref_length(polygon: &SimplePolygon) -> f64 {
    polygon.perimeter() / polygon.len() as f64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualShape {
    m: u32,
    n: usize,
    dir: Vec<i16>,
    dist: Vec<i16>,
}

impl QualShape {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Raw direction entry, `-1` on the diagonal.
    #[inline]
    pub fn dir(&self, i: usize, j: usize) -> i16 {
        self.dir[i * self.n + j]
    }

    /// Raw distance entry, `-1` on the diagonal.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> i16 {
        self.dist[i * self.n + j]
    }

    pub fn sector(&self, i: usize, j: usize) -> Option<SectorId> {
        u32::try_from(self.dir(i, j)).ok().map(SectorId)
    }

    pub fn dist_class(&self, i: usize, j: usize) -> Option<DistClass> {
        u32::try_from(self.dist(i, j)).ok().map(DistClass)
    }

    /// Constant off-diagonal matrices, skipping validation.
    #[cfg(test)]
    pub(crate) fn from_raw_unchecked(m: u32, n: usize, dir: i16, dist: i16) -> Self {
        let fill = |v: i16| {
            (0..n * n)
                .map(|k| if k % (n + 1) == 0 { SENTINEL } else { v })
                .collect()
        };
        QualShape {
            m,
            n,
            dir: fill(dir),
            dist: fill(dist),
        }
    }

    pub(crate) fn dir_slice(&self) -> &[i16] {
        &self.dir
    }

    pub(crate) fn dist_slice(&self) -> &[i16] {
        &self.dist
    }

    pub fn dir_rows(&self) -> Vec<Vec<i32>> {
        rows(&self.dir, self.n)
    }

    pub fn dist_rows(&self) -> Vec<Vec<i32>> {
        rows(&self.dist, self.n)
    }

    /// Builds a descriptor from raw matrices, checking every invariant.
    pub fn from_rows(m: u32, dir: &[Vec<i32>], dist: &[Vec<i32>]) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDescriptor(msg));
        if m == 0 {
            return Err(Error::InvalidGranularity);
        }
        let n = dir.len();
        if n < 3 {
            return bad(format!("needs at least 3 vertices, got {n}"));
        }
        if dist.len() != n || dir.iter().chain(dist).any(|r| r.len() != n) {
            return bad("matrices must both be n×n".into());
        }
        let (max_dir, max_dist) = (4 * m as i32 - 1, 2 * m as i32 - 1);
        for i in 0..n {
            for j in 0..n {
                let (d, c) = (dir[i][j], dist[i][j]);
                if i == j {
                    if d != -1 || c != -1 {
                        return bad(format!("diagonal entry ({i},{i}) must be -1"));
                    }
                } else if !(0..=max_dir).contains(&d) {
                    return bad(format!("dir[{i}][{j}] = {d} outside 0..={max_dir}"));
                } else if !(0..=max_dist).contains(&c) {
                    return bad(format!("dist[{i}][{j}] = {c} outside 0..={max_dist}"));
                }
            }
            if dir[i][(i + 1) % n] != 0 {
                return bad(format!("dir[{i}][{}] must be 0", (i + 1) % n));
            }
        }
        let flat = |m: &[Vec<i32>]| m.iter().flatten().map(|&v| v as i16).collect();
        Ok(QualShape {
            m,
            n,
            dir: flat(dir),
            dist: flat(dist),
        })
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{{\n  \"m\": {},\n  \"n\": {},", self.m, self.n);
        for (name, mat, last) in [("dir", &self.dir, false), ("dist", &self.dist, true)] {
            let _ = writeln!(out, "  \"{name}\": [");
            for (i, row) in mat.chunks(self.n).enumerate() {
                let cells: Vec<String> = row.iter().map(i16::to_string).collect();
                let sep = if i + 1 < self.n { "," } else { "" };
                let _ = writeln!(out, "    [{}]{sep}", cells.join(", "));
            }
            let _ = writeln!(out, "  ]{}", if last { "" } else { "," });
        }
        out.push_str("}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ShapeJson = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

fn rows(flat: &[i16], n: usize) -> Vec<Vec<i32>> {
    flat.chunks(n)
        .map(|r| r.iter().map(|&v| i32::from(v)).collect())
        .collect()
}

/// Wire form of a descriptor.
#[derive(Debug, Serialize, Deserialize)]
pub struct ShapeJson {
    pub m: u32,
    pub n: usize,
    pub dir: Vec<Vec<i32>>,
    pub dist: Vec<Vec<i32>>,
}

impl TryFrom<ShapeJson> for QualShape {
    type Error = Error;

    fn try_from(raw: ShapeJson) -> Result<Self> {
        if raw.dir.len() != raw.n {
            return Err(Error::InvalidDescriptor(format!(
                "n = {} but matrices have {} rows",
                raw.n,
                raw.dir.len()
            )));
        }
        QualShape::from_rows(raw.m, &raw.dir, &raw.dist)
    }
}

impl From<&QualShape> for ShapeJson {
    fn from(s: &QualShape) -> Self {
        ShapeJson {
            m: s.m,
            n: s.n,
            dir: s.dir_rows(),
            dist: s.dist_rows(),
        }
    }
}

/// Descriptor of any closed chain without coincident vertices; simplicity is not checked.
pub fn describe_points(points: &[Point], m: u32) -> Result<QualShape> {
    let n = points.len();
    let mut shape = QualShape {
        m,
        n,
        dir: vec![SENTINEL; n * n],
        dist: vec![SENTINEL; n * n],
    };
    describe_into(points, m, &mut shape.dir, &mut shape.dist)?;
    Ok(shape)
}

/// Fills caller-owned `n×n` buffers; used by the reconstruction loop.
pub(crate) fn describe_into(
    points: &[Point],
    m: u32,
    dir: &mut [i16],
    dist: &mut [i16],
) -> Result<()> {
    let n = points.len();
    if m == 0 {
        return Err(Error::InvalidGranularity);
    }
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let reference = perimeter(points) / n as f64;
    if !(reference.is_finite() && reference > 0.0) {
        return Err(Error::DegenerateEdge { index: 0 });
    }
    for i in 0..n {
        let vi = points[i];
        let ahead = points[(i + 1) % n] - vi;
        if ahead.x == 0.0 && ahead.y == 0.0 {
            return Err(Error::DegenerateEdge { index: i });
        }
        let heading = ahead.y.atan2(ahead.x);
        for (j, &pj) in points.iter().enumerate() {
            let k = i * n + j;
            if i == j {
                dir[k] = SENTINEL;
                dist[k] = SENTINEL;
                continue;
            }
            let d = pj - vi;
            if d.x == 0.0 && d.y == 0.0 {
                return Err(Error::CoincidentPoints);
            }
            dir[k] = sector_of(m, d.y.atan2(d.x) - heading).0 as i16;
            dist[k] = dist_class_of(m, d.norm() / reference)?.0 as i16;
        }
    }
    Ok(())
}

pub fn describe(polygon: &SimplePolygon, m: u32) -> Result<QualShape> {
    describe_points(polygon.vertices(), m)
}

/// Relabels vertex `j` as `j - k (mod n)`.
pub fn rotate_labels(shape: &QualShape, k: usize) -> Result<QualShape> {
    let n = shape.n;
    if k >= n {
        return Err(Error::ShiftOutOfRange { shift: k, n });
    }
    let mut out = shape.clone();
    for i in 0..n {
        for j in 0..n {
            let src = ((i + k) % n) * n + (j + k) % n;
            out.dir[i * n + j] = shape.dir[src];
            out.dist[i * n + j] = shape.dist[src];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_polygon;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn poly(raw: &[(f64, f64)]) -> SimplePolygon {
        let pts: Vec<Point> = raw.iter().map(|&(x, y)| Point::new(x, y)).collect();
        validate_polygon(&pts).unwrap()
    }

    fn unit_square() -> SimplePolygon {
        poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    #[test]
    fn sector_examples() {
        assert_eq!(sector_of(4, 0.0), SectorId(0));
        assert_eq!(sector_of(4, FRAC_PI_2), SectorId(4));
        assert_eq!(sector_of(4, 100f64.to_radians()), SectorId(5));
        assert_eq!(sector_of(4, FRAC_PI_4 + 5e-10), SectorId(2));
        assert_eq!(sector_of(4, FRAC_PI_4 + 5e-9), SectorId(3));
        assert_eq!(sector_of(4, 2.0 * PI - 1e-12), SectorId(0));
        assert_eq!(sector_of(4, 2.0 * PI - 0.1), SectorId(15));
        assert_eq!(sector_of(1, PI), SectorId(2));
        assert_eq!(sector_of(1, 3.0), SectorId(1));
        assert_eq!(sector_of(1, 4.0), SectorId(3));
    }

    #[test]
    fn dist_class_examples() {
        assert_eq!(dist_class_of(4, 1.0).unwrap(), DistClass(4));
        assert_eq!(dist_class_of(4, 0.5).unwrap(), DistClass(3));
        assert_eq!(dist_class_of(4, 100.0).unwrap(), DistClass(7));
        assert_eq!(dist_class_of(4, 1e-6).unwrap(), DistClass(0));
        assert_eq!(dist_class_of(4, 1.999).unwrap(), DistClass(4));
        assert_eq!(dist_class_of(4, 2.0 * (1.0 - 1e-15)).unwrap(), DistClass(5));
        assert!(matches!(
            dist_class_of(4, 0.0),
            Err(Error::NonPositiveRatio(_))
        ));
        assert!(matches!(
            dist_class_of(4, -1.0),
            Err(Error::NonPositiveRatio(_))
        ));
        assert!(dist_class_of(4, f64::NAN).is_err());
    }

    #[test]
    fn ref_length_examples() {
        assert_eq!(ref_length(&unit_square()), 1.0);
        let rect = poly(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]);
        assert_eq!(ref_length(&rect), 1.5);
        let tri = poly(&[(0.0, 0.0), (2.0, 0.0), (1.0, 3f64.sqrt())]);
        assert!((ref_length(&tri) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_square_descriptor() {
        let s = describe(&unit_square(), 4).unwrap();
        assert_eq!((s.dir(0, 1), s.dir(0, 2), s.dir(0, 3)), (0, 2, 4));
        assert_eq!((s.dist(0, 1), s.dist(0, 2), s.dist(0, 3)), (4, 4, 4));
        // backward relations carry the 90° turns
        for i in 0..4 {
            assert_eq!(s.dir((i + 1) % 4, i), 4);
            assert_eq!(s.dir(i, i), -1);
            assert_eq!(s.dist(i, i), -1);
        }
    }

    #[test]
    fn invariant_under_similarity() {
        let base = poly(&[(0.0, 0.0), (4.0, 0.3), (5.0, 2.0), (2.5, 4.0), (0.7, 2.2)]);
        let moved: Vec<Point> = base
            .vertices()
            .iter()
            .map(|&p| p.rotated(33f64.to_radians()) * 10.0 + Point::new(-7.0, 3.5))
            .collect();
        let moved = validate_polygon(&moved).unwrap();
        assert_eq!(describe(&base, 4).unwrap(), describe(&moved, 4).unwrap());
    }

    #[test]
    fn rotate_labels_basics() {
        let s = describe(
            &poly(&[(0.0, 0.0), (4.0, 0.3), (5.0, 2.0), (2.5, 4.0), (0.7, 2.2)]),
            4,
        )
        .unwrap();
        assert_eq!(rotate_labels(&s, 0).unwrap(), s);
        assert!(matches!(
            rotate_labels(&s, 5),
            Err(Error::ShiftOutOfRange { shift: 5, n: 5 })
        ));
        let twice = rotate_labels(&rotate_labels(&s, 3).unwrap(), 4).unwrap();
        assert_eq!(twice, rotate_labels(&s, 2).unwrap());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = describe(&unit_square(), 4).unwrap();
        let text = s.to_json();
        assert!(text.starts_with("{\n  \"m\": 4,\n  \"n\": 4,\n  \"dir\": [\n    [-1, 0, 2, 4],"));
        assert_eq!(QualShape::from_json(&text).unwrap(), s);

        let mut raw = ShapeJson::from(&s);
        raw.dir[0][1] = 3;
        assert!(QualShape::try_from(raw).is_err());
        let mut raw = ShapeJson::from(&s);
        raw.dist[2][1] = 8;
        assert!(QualShape::try_from(raw).is_err());
        let mut raw = ShapeJson::from(&s);
        raw.dir[1][1] = 0;
        assert!(QualShape::try_from(raw).is_err());
        let mut raw = ShapeJson::from(&s);
        raw.n = 5;
        assert!(QualShape::try_from(raw).is_err());
        assert!(QualShape::from_json("{\"m\": 4}").is_err());
    }
}
