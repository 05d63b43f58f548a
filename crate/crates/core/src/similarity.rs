//! Pairwise descriptor comparison.
//!
//! Two descriptors are compared at every cyclic relabelling of the second
//! one; the relabelling with the lowest unweighted `dir_err + dist_err` wins.
//! Corpus-level weights are derived afterwards from the mean errors so that
//! both weighted error matrices have the same mean.

use std::fmt::Write as _;

use serde::Serialize;

use crate::descriptor::QualShape;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Best cyclic relabelling of one shape against another.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Alignment {
    pub shift: usize,
    pub dir_err: f64,
    pub dist_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairComparison {
    pub a: usize,
    pub b: usize,
    pub shift: usize,
    pub dir_err: f64,
    pub dist_err: f64,
}

impl PairComparison {
    pub fn new(a: usize, b: usize, alignment: Alignment) -> Self {
        PairComparison {
            a,
            b,
            shift: alignment.shift,
            dir_err: alignment.dir_err,
            dist_err: alignment.dist_err,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weights {
    pub dst2dir: f64,
    pub w_dir: f64,
    pub w_dist: f64,
}

impl Weights {
    pub const EQUAL: Weights = Weights {
        dst2dir: 1.0,
        w_dir: 0.5,
        w_dist: 0.5,
    };
}

/// Circular distance between two sector ids on a ring of `4m` sectors.
#[inline]
fn circ(x: i16, y: i16, ring: i32) -> u32 {
    let d = (i32::from(x) - i32::from(y)).abs();
    d.min(ring - d) as u32
}

fn check_compatible(a: &QualShape, b: &QualShape) -> Result<()> {
    if a.n() != b.n() || a.m() != b.m() {
        return Err(Error::ShapeMismatch {
            n_a: a.n(),
            n_b: b.n(),
            m_a: a.m(),
            m_b: b.m(),
        });
    }
    Ok(())
}

/// Integer error sums of `a` against `b` relabelled by `shift`: vertex `i` of
/// `a` is paired with vertex `i - shift` of `b`, so `b = rotate_labels(a, k)`
/// matches exactly at `shift = k`.
fn shift_sums(a: &QualShape, b: &QualShape, shift: usize) -> (u64, u64) {
    let n = a.n();
    let ring = 4 * a.m() as i32;
    let (ad, ac) = (a.dir_slice(), a.dist_slice());
    let (bd, bc) = (b.dir_slice(), b.dist_slice());
    let mut dir_sum = 0u64;
    let mut dist_sum = 0u64;
    for i in 0..n {
        let bi = (i + n - shift) % n;
        for j in 0..n {
            if i == j {
                continue;
            }
            let src = bi * n + (j + n - shift) % n;
            let k = i * n + j;
            dir_sum += u64::from(circ(ad[k], bd[src], ring));
            dist_sum += u64::from((i32::from(ac[k]) - i32::from(bc[src])).unsigned_abs());
        }
    }
    (dir_sum, dist_sum)
}

fn normalise(a: &QualShape, (dir_sum, dist_sum): (u64, u64)) -> (f64, f64) {
    let n = a.n() as f64;
    let m = f64::from(a.m());
    let pairs = n * n - n;
    (
        dir_sum as f64 / (pairs * 2.0 * m),
        dist_sum as f64 / (pairs * (2.0 * m - 1.0)),
    )
}

/// Mean circular sector distance over ordered pairs, scaled to `[0, 1]`.
pub fn dir_error(a: &QualShape, b: &QualShape) -> Result<f64> {
    check_compatible(a, b)?;
    Ok(normalise(a, shift_sums(a, b, 0)).0)
}

/// Mean distance-class difference over ordered pairs, scaled to `[0, 1]`.
pub fn dist_error(a: &QualShape, b: &QualShape) -> Result<f64> {
    check_compatible(a, b)?;
    Ok(normalise(a, shift_sums(a, b, 0)).1)
}

/// Evaluates all `n` relabellings of `b`; ties go to lower `dir_err`, then lower shift.
pub fn best_alignment(a: &QualShape, b: &QualShape) -> Result<Alignment> {
    check_compatible(a, b)?;
    Ok(align(a, b))
}

fn align(a: &QualShape, b: &QualShape) -> Alignment {
    let mut best: Option<(f64, Alignment)> = None;
    for shift in 0..a.n() {
        let (dir_err, dist_err) = normalise(a, shift_sums(a, b, shift));
        let total = dir_err + dist_err;
        let better = match &best {
            None => true,
            Some((t, al)) => total < *t || (total == *t && dir_err < al.dir_err),
        };
        if better {
            best = Some((
                total,
                Alignment {
                    shift,
                    dir_err,
                    dist_err,
                },
            ));
        }
    }
    best.expect("descriptors have at least 3 vertices").1
}

/// Number of unordered pairs among `n_shapes` items.
pub fn unique_pairs(n_shapes: u64) -> u64 {
    (n_shapes * n_shapes - n_shapes) / 2
}

/// Weights that equalise the weighted mean direction and distance errors.
pub fn compute_weights(mean_dir: f64, mean_dist: f64) -> Result<Weights> {
    if mean_dir.is_nan() || mean_dir <= 0.0 {
        return Err(Error::ZeroDirectionError);
    }
    if mean_dist == 0.0 {
        log::warn!("mean distance error is zero; all weight goes to distance");
    }
    let dst2dir = mean_dist / mean_dir;
    let w_dir = dst2dir / (dst2dir + 1.0);
    Ok(Weights {
        dst2dir,
        w_dir,
        w_dist: 1.0 - w_dir,
    })
}

pub fn combined_error(pair: &PairComparison, weights: &Weights) -> f64 {
    weights.w_dir * pair.dir_err + weights.w_dist * pair.dist_err
}

impl PairComparison {
    pub fn combined(&self, weights: &Weights) -> f64 {
        combined_error(self, weights)
    }
}

/// All unordered-pair comparisons of a set of shapes, ordered by `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMatrix {
    n_shapes: usize,
    entries: Vec<PairComparison>,
    shift_evaluations: u64,
}

impl ErrorMatrix {
    /// Assembles a matrix from precomputed entries, which must cover every
    /// pair `a < b` exactly once in `(a, b)` order.
    pub fn from_entries(
        n_shapes: usize,
        entries: Vec<PairComparison>,
        shift_evaluations: u64,
    ) -> Result<Self> {
        let expected = unique_pairs(n_shapes as u64) as usize;
        let ordered = entries
            .iter()
            .zip(pair_list(n_shapes))
            .all(|(e, (a, b))| e.a == a && e.b == b);
        if entries.len() != expected || !ordered {
            return Err(Error::InvalidDescriptor(format!(
                "error matrix for {n_shapes} shapes needs {expected} ordered pairs"
            )));
        }
        Ok(ErrorMatrix {
            n_shapes,
            entries,
            shift_evaluations,
        })
    }

    pub fn n_shapes(&self) -> usize {
        self.n_shapes
    }

    pub fn entries(&self) -> &[PairComparison] {
        &self.entries
    }

    /// Number of relabelled-shape comparisons performed while building the matrix.
    pub fn shift_evaluations(&self) -> u64 {
        self.shift_evaluations
    }

    /// Entry for the unordered pair `{a, b}`.
    pub fn get(&self, a: usize, b: usize) -> Option<&PairComparison> {
        if a == b || a >= self.n_shapes || b >= self.n_shapes {
            return None;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let n = self.n_shapes;
        self.entries.get(lo * n - lo * (lo + 1) / 2 + (hi - lo - 1))
    }

    pub fn mean_dir(&self) -> f64 {
        self.entries.iter().map(|e| e.dir_err).sum::<f64>() / self.entries.len() as f64
    }

    pub fn mean_dist(&self) -> f64 {
        self.entries.iter().map(|e| e.dist_err).sum::<f64>() / self.entries.len() as f64
    }

    /// `a,b,shift,dir_err,dist_err,combined`, one row per pair.
    pub fn to_csv(&self, weights: &Weights) -> String {
        let mut out = String::from("a,b,shift,dir_err,dist_err,combined\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6}",
                e.a,
                e.b,
                e.shift,
                e.dir_err,
                e.dist_err,
                e.combined(weights)
            );
        }
        out
    }
}

/// Unordered pairs `(a, b)`, `a < b`, in lexicographic order.
pub fn pair_list(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| ((a + 1)..n).map(move |b| (a, b)))
}

/// Aligns every unordered pair of `shapes`.
pub fn compare_shapes(shapes: &[QualShape], exec: Execution) -> Result<ErrorMatrix> {
    if let Some(first) = shapes.first() {
        for s in &shapes[1..] {
            check_compatible(first, s)?;
        }
    }
    let pairs: Vec<(usize, usize)> = pair_list(shapes.len()).collect();
    let results = exec.map_indexed(pairs.len(), |k| {
        let (a, b) = pairs[k];
        (
            PairComparison::new(a, b, align(&shapes[a], &shapes[b])),
            shapes[a].n() as u64,
        )
    });
    let shift_evaluations = results.iter().map(|(_, c)| c).sum();
    let entries = results.into_iter().map(|(e, _)| e).collect();
    Ok(ErrorMatrix {
        n_shapes: shapes.len(),
        entries,
        shift_evaluations,
    })
}
