//! Directory-level pipeline: preprocessing, all-pairs comparison, weighting
//! and match queries.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dce::{simplify, DEFAULT_VERTICES};
use crate::descriptor::{describe, QualShape, DEFAULT_GRANULARITY};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{read_poly_file, validate_polygon, SimplePolygon};
use crate::outline::{
    load_mask_file, merge_collinear, prune_spurs, trace_largest_boundary, BinaryMask,
    DEFAULT_THRESHOLD,
};
use crate::render::gallery_svg;
use crate::similarity::{compare_shapes, compute_weights, ErrorMatrix, Weights};

/// Turn angle (radians) below which traced boundary vertices are merged away.
pub const MERGE_EPS: f64 = 1e-6;

pub const DEFAULT_TOP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusConfig {
    pub m: u32,
    pub k_vertices: usize,
    pub threshold: u8,
    pub invert: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            m: DEFAULT_GRANULARITY,
            k_vertices: DEFAULT_VERTICES,
            threshold: DEFAULT_THRESHOLD,
            invert: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: usize,
    pub source_path: PathBuf,
    pub polygon: SimplePolygon,
    pub shape: QualShape,
}

impl CorpusEntry {
    pub fn file_name(&self) -> String {
        file_name(&self.source_path)
    }
}

/// A file that was skipped, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileFailure {
    pub file: String,
    pub reason: String,
}

/// Successfully processed entries plus the files that were skipped.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub failures: Vec<FileFailure>,
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SourceKind {
    Mask,
    Poly,
}

fn source_kind(path: &Path) -> Option<SourceKind> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    match ext.as_str() {
        "pbm" | "pgm" => Some(SourceKind::Mask),
        "poly" => Some(SourceKind::Poly),
        _ => None,
    }
}

/// Mask to outline: largest boundary, spurs removed, collinear runs merged.
pub fn extract_polygon(mask: &BinaryMask) -> Result<SimplePolygon> {
    let chain = trace_largest_boundary(mask)?;
    let pruned = prune_spurs(&chain)?;
    let merged = merge_collinear(&pruned, MERGE_EPS)?;
    validate_polygon(&merged)
}

fn process_file(
    path: &Path,
    kind: SourceKind,
    config: &CorpusConfig,
) -> std::result::Result<(SimplePolygon, QualShape), String> {
    let outline = match kind {
        SourceKind::Mask => {
            load_mask_file(path, config.threshold, config.invert).and_then(|m| extract_polygon(&m))
        }
        SourceKind::Poly => read_poly_file(path).and_then(|p| validate_polygon(&p)),
    }
    .map_err(|e| e.to_string())?;
    let simple = simplify(&outline, config.k_vertices).map_err(|e| e.to_string())?;
    if simple.len() != config.k_vertices {
        return Err(format!(
            "outline has only {} vertices, need {}",
            simple.len(),
            config.k_vertices
        ));
    }
    let shape = describe(&simple, config.m).map_err(|e| e.to_string())?;
    Ok((simple, shape))
}

/// Mask (`.pbm`, `.pgm`) and polygon (`.poly`) files of `dir`, by file name.
pub fn list_inputs(dir: &Path) -> Result<Vec<PathBuf>> {
    let read = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for item in read {
        let path = item.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && source_kind(&path).is_some() {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Processes every input file of `dir`. Unreadable or unusable files are
/// logged and recorded as failures; ids are dense over the successes.
pub fn build_corpus(dir: &Path, config: &CorpusConfig, exec: Execution) -> Result<Corpus> {
    let files = list_inputs(dir)?;
    if files.len() < 2 {
        return Err(Error::EmptyCorpus(files.len()));
    }
    let results = exec.map_indexed(files.len(), |i| {
        let kind = source_kind(&files[i]).expect("listed files have a known extension");
        process_file(&files[i], kind, config)
    });
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok((polygon, shape)) => entries.push(CorpusEntry {
                id: entries.len(),
                source_path: path.clone(),
                polygon,
                shape,
            }),
            Err(reason) => {
                log::warn!("skipping {}: {reason}", path.display());
                failures.push(FileFailure {
                    file: file_name(path),
                    reason,
                });
            }
        }
    }
    match entries.len() {
        0 => Err(Error::AllEntriesFailed(files.len())),
        1 => Err(Error::EmptyCorpus(1)),
        _ => Ok(Corpus { entries, failures }),
    }
}

/// All-pairs comparison with corpus weights.
#[derive(Debug, Clone)]
pub struct CorpusComparison {
    pub matrix: ErrorMatrix,
    pub weights: Weights,
    /// Mean direction error was zero; `weights` is the equal-weight fallback.
    pub degenerate: bool,
}

pub fn compare_all(entries: &[CorpusEntry], exec: Execution) -> Result<CorpusComparison> {
    if entries.len() < 2 {
        return Err(Error::EmptyCorpus(entries.len()));
    }
    let (n, m) = (entries[0].shape.n(), entries[0].shape.m());
    if entries.iter().any(|e| e.shape.n() != n || e.shape.m() != m) {
        return Err(Error::HeterogeneousCorpus);
    }
    let shapes: Vec<QualShape> = entries.iter().map(|e| e.shape.clone()).collect();
    let matrix = compare_shapes(&shapes, exec)?;
    let (weights, degenerate) = match compute_weights(matrix.mean_dir(), matrix.mean_dist()) {
        Ok(w) => (w, false),
        Err(Error::ZeroDirectionError) => {
            log::warn!("degenerate corpus: mean direction error is zero; using equal weights");
            (Weights::EQUAL, true)
        }
        Err(e) => return Err(e),
    };
    Ok(CorpusComparison {
        matrix,
        weights,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Match {
    pub id: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchQueries {
    /// Effective list length, `min(k, N - 1)`.
    pub k: usize,
    pub best_match: Vec<Match>,
    pub top_k: Vec<Vec<Match>>,
    pub tally: Vec<usize>,
}

/// Closest match, the `k` closest matches, and how often each entry appears
/// in the other entries' lists. Ties go to the lower partner id.
pub fn report_queries(matrix: &ErrorMatrix, weights: &Weights, k: usize) -> Result<MatchQueries> {
    if k == 0 {
        return Err(Error::InvalidTopK);
    }
    let n = matrix.n_shapes();
    if n < 2 {
        return Err(Error::EmptyCorpus(n));
    }
    let k_eff = if k > n - 1 {
        log::warn!("top {k} exceeds the {} possible partners; clamping", n - 1);
        n - 1
    } else {
        k
    };
    let mut top_k = Vec::with_capacity(n);
    let mut tally = vec![0usize; n];
    for a in 0..n {
        let mut row: Vec<Match> = (0..n)
            .filter(|&b| b != a)
            .map(|b| Match {
                id: b,
                error: matrix.get(a, b).expect("pair exists").combined(weights),
            })
            .collect();
        row.sort_by(|x, y| x.error.total_cmp(&y.error).then(x.id.cmp(&y.id)));
        row.truncate(k_eff);
        for m in &row {
            tally[m.id] += 1;
        }
        top_k.push(row);
    }
    let best_match = top_k.iter().map(|row| row[0]).collect();
    Ok(MatchQueries {
        k: k_eff,
        best_match,
        top_k,
        tally,
    })
}

/// Everything a corpus run reports.
#[derive(Debug, Clone)]
pub struct CorpusReport {
    pub config: CorpusConfig,
    pub entries: Vec<CorpusEntry>,
    pub failures: Vec<FileFailure>,
    pub comparison: CorpusComparison,
    pub queries: MatchQueries,
}

#[derive(Serialize)]
struct EntryJson {
    id: usize,
    file: String,
}

#[derive(Serialize)]
struct BestJson {
    id: usize,
    file: String,
    match_id: usize,
    match_file: String,
    error: f64,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    n_entries: usize,
    m: u32,
    k_vertices: usize,
    top: usize,
    pairs: usize,
    shift_evaluations: u64,
    degenerate: bool,
    weights: Weights,
    mean_dir_err: f64,
    mean_dist_err: f64,
    weighted_mean_dir_err: f64,
    weighted_mean_dist_err: f64,
    entries: Vec<EntryJson>,
    best_match: Vec<BestJson>,
    top_k: &'a [Vec<Match>],
    tally: &'a [usize],
    failures: &'a [FileFailure],
}

impl CorpusReport {
    pub fn build(
        corpus: Corpus,
        config: CorpusConfig,
        top: usize,
        exec: Execution,
    ) -> Result<Self> {
        let comparison = compare_all(&corpus.entries, exec)?;
        let queries = report_queries(&comparison.matrix, &comparison.weights, top)?;
        Ok(CorpusReport {
            config,
            entries: corpus.entries,
            failures: corpus.failures,
            comparison,
            queries,
        })
    }

    pub fn pairs_csv(&self) -> String {
        self.comparison.matrix.to_csv(&self.comparison.weights)
    }

    pub fn to_json(&self) -> String {
        let matrix = &self.comparison.matrix;
        let w = self.comparison.weights;
        let names: Vec<String> = self.entries.iter().map(CorpusEntry::file_name).collect();
        let doc = ReportJson {
            n_entries: self.entries.len(),
            m: self.config.m,
            k_vertices: self.config.k_vertices,
            top: self.queries.k,
            pairs: matrix.entries().len(),
            shift_evaluations: matrix.shift_evaluations(),
            degenerate: self.comparison.degenerate,
            weights: w,
            mean_dir_err: matrix.mean_dir(),
            mean_dist_err: matrix.mean_dist(),
            weighted_mean_dir_err: w.w_dir * matrix.mean_dir(),
            weighted_mean_dist_err: w.w_dist * matrix.mean_dist(),
            entries: names
                .iter()
                .enumerate()
                .map(|(id, file)| EntryJson {
                    id,
                    file: file.clone(),
                })
                .collect(),
            best_match: self
                .queries
                .best_match
                .iter()
                .enumerate()
                .map(|(id, m)| BestJson {
                    id,
                    file: names[id].clone(),
                    match_id: m.id,
                    match_file: names[m.id].clone(),
                    error: m.error,
                })
                .collect(),
            top_k: &self.queries.top_k,
            tally: &self.queries.tally,
            failures: &self.failures,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("report serialises");
        text.push('\n');
        text
    }

    /// One gallery per entry: the entry followed by its top matches.
    pub fn galleries(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::with_capacity(self.entries.len());
        for (entry, row) in self.entries.iter().zip(&self.queries.top_k) {
            let mut polys = vec![entry.polygon.clone()];
            let mut labels = vec![format!("#{} {}", entry.id, entry.file_name())];
            for m in row {
                polys.push(self.entries[m.id].polygon.clone());
                labels.push(format!("#{} {:.2}%", m.id, 100.0 * m.error));
            }
            let stem = entry
                .source_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            out.push((
                format!("{:03}_{stem}.svg", entry.id),
                gallery_svg(&polys, &labels)?,
            ));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub input: PathBuf,
    pub out: PathBuf,
    pub config: CorpusConfig,
    pub top: usize,
    pub exec: Execution,
    pub svg: bool,
}

/// Full corpus run writing `pairs.csv`, `report.json` and, optionally,
/// `matches/*.svg` into `out`.
pub fn run(options: &RunOptions) -> Result<CorpusReport> {
    let corpus = build_corpus(&options.input, &options.config, options.exec)?;
    let report = CorpusReport::build(corpus, options.config, options.top, options.exec)?;
    let out = &options.out;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let write =
        |path: PathBuf, text: String| std::fs::write(&path, text).map_err(|e| Error::io(path, e));
    write(out.join("pairs.csv"), report.pairs_csv())?;
    write(out.join("report.json"), report.to_json())?;
    if options.svg {
        let dir = out.join("matches");
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (name, svg) in report.galleries()? {
            write(dir.join(name), svg)?;
        }
    }
    Ok(report)
}
