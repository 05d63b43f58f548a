//! Prototype polygons from descriptors.
//!
//! A prototype is first traced from the descriptor's hull relations
//! (consecutive-vertex distance classes and backward direction sectors), then
//! refined by steepest-descent vertex moves that minimise the mismatch
//! between the candidate's own descriptor and the target.

use std::f64::consts::{PI, TAU};

use crate::descriptor::{describe_into, QualShape};
use crate::error::{Error, Result};
use crate::geometry::{find_self_intersection, perimeter, validate_polygon, Point, SimplePolygon};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    /// First step size, as a fraction of the candidate's mean edge length.
    pub initial_step: f64,
    /// The search stops once the step falls below this fraction.
    pub min_step: f64,
    /// Maximum number of candidate evaluations, the initial one included.
    pub eval_budget: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            initial_step: 0.5,
            min_step: 1.0 / 64.0,
            eval_budget: 10_000,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.eval_budget == 0 {
            return Err(Error::BudgetTooSmall);
        }
        if !(self.min_step > 0.0
            && self.min_step < self.initial_step
            && self.initial_step.is_finite())
        {
            return Err(Error::InvalidParams(format!(
                "need 0 < min_step < initial_step, got {} and {}",
                self.min_step, self.initial_step
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub vertices: Vec<Point>,
    pub initial_score: f64,
    pub final_score: f64,
    pub evaluations: u64,
    /// Score before the first move and after every applied move.
    pub score_trace: Vec<f64>,
    pub simple: bool,
    pub exact_match: bool,
    pub warnings: Vec<String>,
}

impl ReconstructionResult {
    pub fn moves(&self) -> usize {
        self.score_trace.len() - 1
    }

    pub fn polygon(&self) -> Result<SimplePolygon> {
        validate_polygon(&self.vertices)
    }
}

/// Sector midpoint; the exact ray for linear sectors.
pub fn rep_angle(m: u32, sector: i16) -> f64 {
    f64::from(sector) * PI / (2.0 * f64::from(m))
}

/// Geometric midpoint of a distance class, for a reference length of 1.
pub fn rep_dist(m: u32, class: i16) -> f64 {
    2f64.powf(f64::from(class) - f64::from(m) + 0.5)
}

fn trace_with(shape: &QualShape, bearings: &[f64]) -> Vec<Point> {
    let n = shape.n();
    let m = shape.m();
    let mut pts = Vec::with_capacity(n);
    let mut v = Point::new(0.0, 0.0);
    let mut heading = 0.0f64;
    pts.push(v);
    for (i, &bearing) in bearings.iter().enumerate().take(n - 1) {
        let len = rep_dist(m, shape.dist(i, i + 1));
        v = v + Point::new(heading.cos(), heading.sin()) * len;
        pts.push(v);
        heading = (heading + PI - bearing).rem_euclid(TAU);
    }
    pts
}

/// Backward bearing at each vertex `i + 1` towards vertex `i`, sector midpoints.
fn midpoint_bearings(shape: &QualShape) -> Vec<f64> {
    let n = shape.n();
    (0..n)
        .map(|i| rep_angle(shape.m(), shape.dir((i + 1) % n, i)))
        .collect()
}

/// Traces the hull relations: edges take their distance-class midpoint, turns
/// take the backward sector's midpoint angle. The closing edge is implicit.
pub fn trace_prototype(shape: &QualShape) -> Vec<Point> {
    trace_with(shape, &midpoint_bearings(shape))
}

/// Like [`trace_prototype`], but shifts the angles inside the planar backward
/// sectors so the turns add up to one full revolution. Shapes whose sector
/// midpoints do not close (regular polygons with planar turns, for example)
/// start much nearer a consistent realisation this way.
pub fn trace_prototype_closed(shape: &QualShape) -> Vec<Point> {
    let n = shape.n();
    let m = shape.m();
    let half = PI / (2.0 * f64::from(m));
    let mut bearings = midpoint_bearings(shape);
    let planar: Vec<usize> = (0..n)
        .filter(|&i| shape.dir((i + 1) % n, i) % 2 == 1)
        .collect();
    // total turn is Σ(π - bearing); a simple CCW chain turns by exactly 2π
    let mut excess = bearings.iter().map(|b| PI - b).sum::<f64>() - TAU;
    let mut free = planar;
    let margin = 0.1 * half;
    while excess.abs() > 1e-15 && !free.is_empty() {
        let share = excess / free.len() as f64;
        let mut still_free = Vec::with_capacity(free.len());
        for &i in &free {
            let mid = rep_angle(m, shape.dir((i + 1) % n, i));
            let (lo, hi) = (mid - half + margin, mid + half - margin);
            let want = bearings[i] + share;
            let got = want.clamp(lo, hi);
            excess -= got - bearings[i];
            bearings[i] = got;
            if got == want {
                still_free.push(i);
            }
        }
        if still_free.len() == free.len() {
            break;
        }
        free = still_free;
    }
    trace_with(shape, &bearings)
}

/// Reusable descriptor buffers for repeated scoring against one target.
struct Scorer<'a> {
    target: &'a QualShape,
    dir: Vec<i16>,
    dist: Vec<i16>,
}

impl<'a> Scorer<'a> {
    fn new(target: &'a QualShape) -> Self {
        let nn = target.n() * target.n();
        Scorer {
            target,
            dir: vec![0; nn],
            dist: vec![0; nn],
        }
    }

    fn score(&mut self, candidate: &[Point]) -> Result<f64> {
        let t = self.target;
        let n = t.n();
        if candidate.len() != n {
            return Err(Error::DegenerateCandidate(format!(
                "expected {n} vertices, got {}",
                candidate.len()
            )));
        }
        describe_into(candidate, t.m(), &mut self.dir, &mut self.dist)
            .map_err(|e| Error::DegenerateCandidate(e.to_string()))?;
        let ring = 4 * t.m() as i32;
        let (td, tc) = (t.dir_slice(), t.dist_slice());
        let mut dir_sum = 0u64;
        let mut dist_sum = 0u64;
        for k in 0..n * n {
            if k % (n + 1) == 0 {
                continue;
            }
            let d = (i32::from(self.dir[k]) - i32::from(td[k])).abs();
            dir_sum += d.min(ring - d) as u64;
            dist_sum += (i32::from(self.dist[k]) - i32::from(tc[k])).unsigned_abs() as u64;
        }
        let m = f64::from(t.m());
        Ok(dir_sum as f64 / (2.0 * m) + dist_sum as f64 / (2.0 * m - 1.0))
    }
}

/// Sum over ordered pairs of the normalised sector and distance-class differences
/// between the candidate's descriptor and `target`. Zero iff they are identical.
pub fn mismatch_score(candidate: &[Point], target: &QualShape) -> Result<f64> {
    Scorer::new(target).score(candidate)
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

// E, NE, N, NW, W, SW, S, SE
const COMPASS: [Point; 8] = [
    Point::new(1.0, 0.0),
    Point::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Point::new(0.0, 1.0),
    Point::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Point::new(-1.0, 0.0),
    Point::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    Point::new(0.0, -1.0),
    Point::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

/// Steepest descent over single-vertex compass moves.
///
/// Each round tries every vertex (ascending) in every compass direction
/// (E first, counter-clockwise) and applies the best strictly improving move.
/// Without one the step is halved. Moves that would turn a simple candidate
/// into a self-intersecting one are not taken.
pub fn greedy_refine(
    candidate: &[Point],
    target: &QualShape,
    params: &SearchParams,
) -> Result<ReconstructionResult> {
    params.validate()?;
    let n = target.n();
    let mut scorer = Scorer::new(target);
    let mut cur = candidate.to_vec();
    let mut cur_score = scorer.score(&cur)?;
    let mut evaluations = 1u64;
    let mut cur_simple = find_self_intersection(&cur).is_none();
    let mut trace = vec![cur_score];

    let reference = perimeter(&cur) / n as f64;
    let mut step = params.initial_step * reference;
    let floor = params.min_step * reference;

    let mut exhausted = evaluations >= params.eval_budget;
    while cur_score > 0.0 && step >= floor && !exhausted {
        let mut best: Option<(f64, usize, Point, bool)> = None;
        'scan: for v in 0..n {
            let origin = cur[v];
            for dir in COMPASS {
                if evaluations >= params.eval_budget {
                    exhausted = true;
                    break 'scan;
                }
                cur[v] = origin + dir * step;
                evaluations += 1;
                if let Ok(s) = scorer.score(&cur) {
                    if s < cur_score && best.is_none_or(|b| s < b.0) {
                        let simple = find_self_intersection(&cur).is_none();
                        if simple || !cur_simple {
                            best = Some((s, v, cur[v], simple));
                        }
                    }
                }
            }
            cur[v] = origin;
        }
        match best {
            Some((s, v, p, simple)) => {
                cur[v] = p;
                cur_score = s;
                cur_simple = simple;
                trace.push(s);
            }
            None if !exhausted => step /= 2.0,
            None => {}
        }
    }

    let mut warnings = Vec::new();
    if !cur_simple {
        warnings.push("NonSimpleResult: refined candidate self-intersects".to_string());
    }
    Ok(ReconstructionResult {
        vertices: cur,
        initial_score: trace[0],
        final_score: cur_score,
        evaluations,
        score_trace: trace,
        simple: cur_simple,
        exact_match: cur_score == 0.0 && cur_simple,
        warnings,
    })
}

fn rank(r: &ReconstructionResult) -> (bool, f64) {
    (!r.simple, r.final_score)
}

/// Full reconstruction: refines the closure-balanced trace and, unless that
/// already matches exactly, the midpoint trace too, each with the full
/// budget. The better result (simple first, then lower score) is returned.
pub fn reconstruct(shape: &QualShape, params: &SearchParams) -> Result<ReconstructionResult> {
    params.validate()?;
    let closed = greedy_refine(&trace_prototype_closed(shape), shape, params);
    if let Ok(r) = &closed {
        if r.exact_match {
            return closed;
        }
    }
    let mid = greedy_refine(&trace_prototype(shape), shape, params);
    match (closed, mid) {
        (Ok(a), Ok(b)) => {
            let used = a.evaluations + b.evaluations;
            let mut best = if rank(&b) < rank(&a) { b } else { a };
            best.evaluations = used;
            Ok(best)
        }
        (Ok(a), Err(_)) => Ok(a),
        (Err(_), b) => b,
    }
}
