//! Discrete Curve Evolution.
//!
//! Repeatedly deletes the vertex with the smallest relevance
//! `K = β·l1·l2 / (l1 + l2)` (β the absolute turn angle, l1 and l2 the
//! adjacent edge lengths) until the target vertex count is reached. A vertex
//! whose removal would make the polygon non-simple is skipped in favour of
//! the next least relevant one.

use crate::error::{Error, Result};
use crate::geometry::{segments_intersect, validate_polygon, Point, SimplePolygon};

/// Default target vertex count (three vertices per unit of granularity at m = 4).
pub const DEFAULT_VERTICES: usize = 12;

// relevances this close (relative) are treated as ties
const TIE_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelevanceScore {
    pub vertex_index: usize,
    pub score: f64,
}

pub fn relevance(prev: Point, v: Point, next: Point) -> Result<f64> {
    let a = v - prev;
    let b = next - v;
    let l1 = a.norm();
    let l2 = b.norm();
    if l1 == 0.0 {
        return Err(Error::DegenerateEdge { index: 0 });
    }
    if l2 == 0.0 {
        return Err(Error::DegenerateEdge { index: 1 });
    }
    let beta = a.cross(b).atan2(a.dot(b)).abs();
    Ok(beta * l1 * l2 / (l1 + l2))
}

/// Relevance of every vertex of a closed chain.
pub fn relevances(polygon: &SimplePolygon) -> Vec<RelevanceScore> {
    let v = polygon.vertices();
    let n = v.len();
    (0..n)
        .map(|i| RelevanceScore {
            vertex_index: i,
            // a SimplePolygon has no zero-length edges
            score: relevance(v[(i + n - 1) % n], v[i], v[(i + 1) % n]).unwrap_or(0.0),
        })
        .collect()
}

struct Ring<'a> {
    pts: &'a [Point],
    prev: Vec<usize>,
    next: Vec<usize>,
    alive: Vec<bool>,
    score: Vec<f64>,
    count: usize,
}

impl<'a> Ring<'a> {
    fn new(pts: &'a [Point]) -> Self {
        let n = pts.len();
        let mut ring = Ring {
            pts,
            prev: (0..n).map(|i| (i + n - 1) % n).collect(),
            next: (0..n).map(|i| (i + 1) % n).collect(),
            alive: vec![true; n],
            score: vec![0.0; n],
            count: n,
        };
        for i in 0..n {
            ring.rescore(i);
        }
        ring
    }

    fn rescore(&mut self, i: usize) {
        let (p, q) = (self.prev[i], self.next[i]);
        self.score[i] = relevance(self.pts[p], self.pts[i], self.pts[q]).unwrap_or(0.0);
    }

    /// Alive vertices by ascending relevance; near-ties ordered by index.
    fn candidates(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.pts.len()).filter(|&i| self.alive[i]).collect();
        idx.sort_by(|&a, &b| self.score[a].total_cmp(&self.score[b]).then(a.cmp(&b)));
        let mut start = 0;
        while start < idx.len() {
            let base = self.score[idx[start]];
            let limit = base + TIE_REL * base.abs();
            let end = start
                + idx[start..]
                    .iter()
                    .take_while(|&&i| self.score[i] <= limit)
                    .count();
            idx[start..end].sort_unstable();
            start = end;
        }
        idx
    }

    /// Whether cutting the corner at `v` keeps the chain simple.
    fn removable(&self, v: usize) -> bool {
        let (p, q) = (self.prev[v], self.next[v]);
        let (a, b) = (self.pts[p], self.pts[q]);
        let pp = self.pts[self.prev[p]];
        let qq = self.pts[self.next[q]];
        if self.count - 1 == 3 {
            return (b - a).cross(qq - a) != 0.0;
        }
        // new edge must not fold back onto its neighbours
        let folds =
            |x: Point, y: Point, z: Point| (y - x).cross(z - x) == 0.0 && (x - y).dot(z - y) > 0.0;
        if folds(pp, a, b) || folds(a, b, qq) {
            return false;
        }
        // every other edge, from next(q) round to the one ending at prev(p)
        let mut e = self.next[q];
        while e != self.prev[p] {
            let f = self.next[e];
            if segments_intersect(a, b, self.pts[e], self.pts[f]) {
                return false;
            }
            e = f;
        }
        true
    }

    fn remove(&mut self, v: usize) {
        let (p, q) = (self.prev[v], self.next[v]);
        self.alive[v] = false;
        self.next[p] = q;
        self.prev[q] = p;
        self.count -= 1;
        self.rescore(p);
        self.rescore(q);
    }
}

/// Reduces `polygon` to `k` vertices. Inputs with `n <= k` are returned as is.
pub fn simplify(polygon: &SimplePolygon, k: usize) -> Result<SimplePolygon> {
    if k < 3 {
        return Err(Error::TargetTooSmall(k));
    }
    if polygon.len() <= k {
        return Ok(polygon.clone());
    }
    let pts = polygon.vertices();
    let mut ring = Ring::new(pts);
    while ring.count > k {
        let victim = ring
            .candidates()
            .into_iter()
            .find(|&v| ring.removable(v))
            .ok_or(Error::SimplificationStuck(ring.count))?;
        ring.remove(victim);
    }
    let kept: Vec<Point> = (0..pts.len())
        .filter(|&i| ring.alive[i])
        .map(|i| pts[i])
        .collect();
    validate_polygon(&kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, TAU};

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn relevance_examples() {
        assert_eq!(
            relevance(p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)).unwrap(),
            0.0
        );
        let right = relevance(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)).unwrap();
        assert!((right - FRAC_PI_4).abs() < 1e-12);
        // (π/2)·(2·1)/(2+1), evaluated by hand
        let uneven = relevance(p(0.0, 0.0), p(2.0, 0.0), p(2.0, 1.0)).unwrap();
        assert!((uneven - FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn relevance_degenerate() {
        assert!(matches!(
            relevance(p(1.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)),
            Err(Error::DegenerateEdge { index: 0 })
        ));
        assert!(matches!(
            relevance(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0)),
            Err(Error::DegenerateEdge { index: 1 })
        ));
    }

    #[test]
    fn collinear_midpoint_goes_first() {
        let poly = validate_polygon(&[
            p(0.0, 0.0),
            p(1.0, 0.0),
            p(2.0, 0.0),
            p(2.0, 2.0),
            p(0.0, 2.0),
        ])
        .unwrap();
        let out = simplify(&poly, 4).unwrap();
        assert_eq!(
            out.vertices(),
            &[p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0)]
        );
    }

    #[test]
    fn identity_when_target_not_below_n() {
        let poly = validate_polygon(&[p(0.0, 0.0), p(3.0, 0.0), p(1.0, 2.0)]).unwrap();
        assert_eq!(simplify(&poly, 3).unwrap(), poly);
        assert_eq!(simplify(&poly, 12).unwrap(), poly);
        assert!(matches!(simplify(&poly, 2), Err(Error::TargetTooSmall(2))));
    }

    #[test]
    fn hexagon_tie_removes_lowest_index() {
        let hex: Vec<Point> = (0..6)
            .map(|i| {
                let t = i as f64 * TAU / 6.0;
                p(t.cos(), t.sin())
            })
            .collect();
        let poly = validate_polygon(&hex).unwrap();
        let scores = relevances(&poly);
        // unit edges, turn π/3 → (π/3)·(1·1)/2
        for s in &scores {
            assert!((s.score - FRAC_PI_3 / 2.0).abs() < 1e-12);
        }
        let out = simplify(&poly, 5).unwrap();
        assert_eq!(out.vertices(), &hex[1..]);
    }

    #[test]
    fn guard_skips_vertex_that_would_self_intersect() {
        // a deep notch: removing 2 (cheapest) would cut across vertex 6's spike
        let pts = [
            p(0.0, 0.0),
            p(10.0, 0.0),
            p(10.0, 0.5),
            p(10.0, 10.0),
            p(5.2, 10.0),
            p(5.0, 0.2),
            p(4.8, 10.0),
            p(0.0, 10.0),
        ];
        let poly = validate_polygon(&pts).unwrap();
        for k in 3..8 {
            let out = simplify(&poly, k).unwrap();
            assert_eq!(out.len(), k);
        }
    }
}
