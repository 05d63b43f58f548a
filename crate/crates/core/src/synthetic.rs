//! Seeded generators for test shapes, masks and demo corpora.

use std::f64::consts::TAU;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{format_poly, validate_polygon, Point};
use crate::outline::BinaryMask;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Star-shaped polygon around the origin: strictly increasing angles and
/// radii in `[r_min, 1]`, hence simple and counter-clockwise.
pub fn star_polygon<R: Rng>(rng: &mut R, n: usize, r_min: f64) -> Vec<Point> {
    let mut gaps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.4..1.0)).collect();
    let total: f64 = gaps.iter().sum();
    gaps.iter_mut().for_each(|g| *g *= TAU / total);
    let start = rng.gen_range(0.0..TAU);
    let mut theta = start;
    gaps.iter()
        .map(|g| {
            let r = rng.gen_range(r_min..1.0);
            let p = Point::new(r * theta.cos(), r * theta.sin());
            theta += g;
            p
        })
        .collect()
}

/// Random rotation, uniform scale and translation.
#[derive(Debug, Clone, Copy)]
pub struct Similarity {
    pub angle: f64,
    pub scale: f64,
    pub offset: Point,
}

impl Similarity {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        Similarity {
            angle: rng.gen_range(0.0..TAU),
            scale: 10f64.powf(rng.gen_range(-2.0..3.0)),
            offset: Point::new(rng.gen_range(-1e3..1e3), rng.gen_range(-1e3..1e3)),
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        p.rotated(self.angle) * self.scale + self.offset
    }

    pub fn apply_all(&self, pts: &[Point]) -> Vec<Point> {
        pts.iter().map(|&p| self.apply(p)).collect()
    }
}

/// Smallest absolute turn angle over the vertices of a closed chain.
fn min_turn(pts: &[Point]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let a = pts[i] - pts[(i + n - 1) % n];
            let b = pts[(i + 1) % n] - pts[i];
            a.cross(b).atan2(a.dot(b)).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

fn min_edge(pts: &[Point]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| pts[i].distance(pts[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// A `corners`-gon whose corners all turn by at least `min_angle` and whose
/// edges are at least `min_len` long.
pub fn salient_polygon<R: Rng>(
    rng: &mut R,
    corners: usize,
    min_angle: f64,
    min_len: f64,
) -> Vec<Point> {
    loop {
        let p = star_polygon(rng, corners, 0.3);
        if min_turn(&p) >= min_angle && min_edge(&p) >= min_len {
            return p;
        }
    }
}

/// Inserts `extra` evenly spaced collinear points on every edge.
pub fn subdivide(pts: &[Point], extra: usize) -> Vec<Point> {
    let n = pts.len();
    let mut out = Vec::with_capacity(n * (extra + 1));
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for k in 0..=extra {
            let t = k as f64 / (extra + 1) as f64;
            out.push(a + (b - a) * t);
        }
    }
    out
}

/// Moves every vertex by up to `fraction` of the bounding-box diagonal.
pub fn jitter<R: Rng>(rng: &mut R, pts: &[Point], fraction: f64) -> Vec<Point> {
    let (lo, hi) = bounds(pts);
    let radius = fraction * lo.distance(hi);
    pts.iter()
        .map(|&p| {
            let r = radius * rng.gen_range(0.0f64..1.0).sqrt();
            let t = rng.gen_range(0.0..TAU);
            p + Point::new(r * t.cos(), r * t.sin())
        })
        .collect()
}

pub fn bounds(pts: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

/// Even-odd test of pixel centres against a polygon given in pixel units
/// (y up, as produced by outline tracing).
pub fn rasterize(pts: &[Point], width: usize, height: usize) -> BinaryMask {
    let inside = |x: f64, y: f64| {
        let n = pts.len();
        let mut hit = false;
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            if (a.y > y) != (b.y > y) && x < a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y) {
                hit = !hit;
            }
        }
        hit
    };
    BinaryMask::from_fn(width, height, |col, row| {
        inside(col as f64 + 0.5, height as f64 - row as f64 - 0.5)
    })
    .expect("dimensions are positive")
}

/// One named shape of a demo corpus.
#[derive(Debug, Clone)]
pub struct NamedShape {
    pub name: String,
    /// Index of the shape this one was derived from, for noisy duplicates.
    pub original_of: Option<usize>,
    pub points: Vec<Point>,
}

/// `originals` distinct salient 12-gons (densified with collinear points) plus
/// one noisy duplicate of each: jittered by `jitter_fraction` of the bounding
/// diagonal, moved by a random similarity and relabelled from a random vertex.
pub fn demo_corpus(seed: u64, originals: usize, jitter_fraction: f64) -> Vec<NamedShape> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(2 * originals);
    for k in 0..originals {
        let corners = salient_polygon(&mut rng, 12, 0.45, 0.25);
        let dense = subdivide(&corners, 3);
        // resample until the jittered ring is still simple
        let mut noisy = loop {
            let candidate = jitter(&mut rng, &dense, jitter_fraction);
            if validate_polygon(&candidate).is_ok() {
                break candidate;
            }
        };
        noisy = Similarity::random(&mut rng).apply_all(&noisy);
        let start = rng.gen_range(0..noisy.len());
        noisy.rotate_left(start);
        let original = out.len();
        out.push(NamedShape {
            name: format!("shape_{k:02}"),
            original_of: None,
            points: dense,
        });
        out.push(NamedShape {
            name: format!("shape_{k:02}_dup"),
            original_of: Some(original),
            points: noisy,
        });
    }
    out
}

/// Writes each shape as `<name>.poly` under `dir`.
pub fn write_corpus(dir: &Path, shapes: &[NamedShape]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for s in shapes {
        let path = dir.join(format!("{}.poly", s.name));
        std::fs::write(&path, format_poly(&s.points)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
