//! Binary masks and outline extraction.
//!
//! Masks are read from Netpbm files, the largest 8-connected foreground
//! component is traced with Moore-neighbour tracing, and the resulting
//! pixel-centre chain is cleaned up before simplification.

mod pnm;

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{orient_ccw, Point};

pub const DEFAULT_THRESHOLD: u8 = 128;

/// Row-major foreground flags; row 0 is the top image row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::CorruptHeader(format!(
                "zero dimension {width}x{height}"
            )));
        }
        if bits.len() != width * height {
            return Err(Error::TruncatedData {
                expected: width * height,
                found: bits.len(),
            });
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let bits = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    pub fn foreground_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Serialises the mask as an ASCII bitmap (P1), foreground black.
    pub fn to_pbm(&self) -> String {
        let mut out = format!("P1\n{} {}\n", self.width, self.height);
        for row in self.bits.chunks(self.width) {
            let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Decodes a PBM/PGM file into a mask.
///
/// Bitmaps: black pixels are foreground. Greymaps: samples (scaled to
/// 0..=255) below `threshold` are foreground. `invert` swaps the two.
pub fn load_mask(bytes: &[u8], threshold: u8, invert: bool) -> Result<BinaryMask> {
    let img = pnm::decode(bytes)?;
    let bits = if img.kind.is_bitmap() {
        img.samples.iter().map(|&s| (s == 1) != invert).collect()
    } else {
        img.samples
            .iter()
            .map(|&s| (s < threshold) != invert)
            .collect()
    };
    BinaryMask::new(img.width, img.height, bits)
}

pub fn load_mask_file(path: &Path, threshold: u8, invert: bool) -> Result<BinaryMask> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    load_mask(&bytes, threshold, invert)
}

// Moore neighbourhood, clockwise on screen (y down), starting west.
const NEIGHBOURS: [(isize, isize); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

type Pixel = (isize, isize);

/// Labels 8-connected components and returns the pixels of the largest one.
/// Ties go to the component found first in raster order.
fn largest_component(mask: &BinaryMask) -> Option<BinaryMask> {
    let (w, h) = (mask.width, mask.height);
    let mut label = vec![0u32; w * h];
    let mut best: Option<(u32, usize)> = None;
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.bits[start] || label[start] != 0 {
            continue;
        }
        next += 1;
        label[start] = next;
        stack.push(start);
        let mut size = 0usize;
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for (dx, dy) in NEIGHBOURS {
                let (nx, ny) = (x + dx, y + dy);
                if mask.get_signed(nx, ny) {
                    let j = ny as usize * w + nx as usize;
                    if label[j] == 0 {
                        label[j] = next;
                        stack.push(j);
                    }
                }
            }
        }
        if best.is_none_or(|(_, s)| size > s) {
            best = Some((next, size));
        }
    }
    let (id, _) = best?;
    Some(BinaryMask {
        width: w,
        height: h,
        bits: label.iter().map(|&l| l == id).collect(),
    })
}

/// One clockwise Moore step from `c`, whose backtrack (background) neighbour is `b`.
fn moore_step(comp: &BinaryMask, c: Pixel, b: Pixel) -> Option<(Pixel, Pixel)> {
    let rel = (b.0 - c.0, b.1 - c.1);
    let start = NEIGHBOURS.iter().position(|&d| d == rel)?;
    let mut prev = b;
    for k in 1..=8 {
        let (dx, dy) = NEIGHBOURS[(start + k) % 8];
        let p = (c.0 + dx, c.1 + dy);
        if comp.get_signed(p.0, p.1) {
            return Some((p, prev));
        }
        prev = p;
    }
    None
}

/// Pixel-centre boundary of the largest 8-connected foreground component.
///
/// The chain starts at the top-most, then left-most pixel and runs
/// counter-clockwise in y-up coordinates (`y = height - row - 0.5`).
/// Interior holes are ignored.
pub fn trace_largest_boundary(mask: &BinaryMask) -> Result<Vec<Point>> {
    let comp = largest_component(mask).ok_or(Error::EmptyMask)?;
    let first = comp.bits.iter().position(|&b| b).ok_or(Error::EmptyMask)?;
    let s: Pixel = ((first % comp.width) as isize, (first / comp.width) as isize);
    let b0: Pixel = (s.0 - 1, s.1);

    let mut chain = vec![s];
    let mut c = s;
    let mut b = b0;
    let mut first_move = None;
    let limit = 4 * comp.foreground_count() + 16;
    while let Some((nc, nb)) = moore_step(&comp, c, b) {
        match first_move {
            None => first_move = Some((nc, nb)),
            // back at the start and about to repeat the first move
            Some(fm) if c == s && (nc, nb) == fm => {
                chain.pop();
                break;
            }
            _ => {}
        }
        // Jacob's criterion: start pixel entered the way it was first entered
        if nc == s && nb == b0 {
            break;
        }
        chain.push(nc);
        if chain.len() > limit {
            break;
        }
        c = nc;
        b = nb;
    }
    if chain.len() < 3 {
        return Err(Error::ComponentTooSmall(chain.len()));
    }
    let h = comp.height as f64;
    let mut points: Vec<Point> = chain
        .into_iter()
        .map(|(x, y)| Point::new(x as f64 + 0.5, h - y as f64 - 0.5))
        .collect();
    orient_ccw(&mut points);
    Ok(points)
}

/// Absolute turn angle at `v`, zero when an adjacent edge is degenerate.
fn turn_angle(prev: Point, v: Point, next: Point) -> f64 {
    let a = v - prev;
    let b = next - v;
    if (a.x == 0.0 && a.y == 0.0) || (b.x == 0.0 && b.y == 0.0) {
        return 0.0;
    }
    a.cross(b).atan2(a.dot(b)).abs()
}

/// Drops every vertex whose turn angle is below `eps` radians, until none remain.
pub fn merge_collinear(points: &[Point], eps: f64) -> Result<Vec<Point>> {
    if points.len() < 3 {
        return Err(Error::CollapsedPolygon);
    }
    let mut cur = points.to_vec();
    loop {
        let n = cur.len();
        let mut out: Vec<Point> = Vec::with_capacity(n);
        for i in 0..n {
            let prev = out.last().copied().unwrap_or(cur[(i + n - 1) % n]);
            let next = cur[(i + 1) % n];
            if turn_angle(prev, cur[i], next) >= eps {
                out.push(cur[i]);
            }
        }
        if out.len() < 3 {
            return Err(Error::CollapsedPolygon);
        }
        if out.len() == n {
            return Ok(out);
        }
        cur = out;
    }
}

/// Removes out-and-back excursions (`a, b, a`) and repeated vertices from a
/// traced chain, as left behind by one-pixel-wide protrusions.
pub fn prune_spurs(points: &[Point]) -> Result<Vec<Point>> {
    let mut cur = points.to_vec();
    loop {
        let n = cur.len();
        if n < 3 {
            return Err(Error::CollapsedPolygon);
        }
        let dup = (0..n).find(|&i| cur[i] == cur[(i + 1) % n]);
        if let Some(i) = dup {
            cur.remove(i);
            continue;
        }
        let spur = (0..n).find(|&i| cur[(i + n - 1) % n] == cur[(i + 1) % n]);
        match spur {
            Some(i) => {
                // drop the tip and the repeated base vertex
                let j = (i + 1) % n;
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                cur.remove(hi);
                cur.remove(lo);
            }
            None => return Ok(cur),
        }
    }
}
