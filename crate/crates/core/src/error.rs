use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // geometry
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("edges {first} and {second} intersect")]
    SelfIntersecting { first: usize, second: usize },
    #[error("edge {index} is degenerate (zero length)")]
    DegenerateEdge { index: usize },
    #[error("polygon has zero signed area (all vertices collinear)")]
    ZeroArea,
    #[error("vertex {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },
    #[error("bearing undefined: target coincides with origin")]
    CoincidentPoints,

    // masks and outlines
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("corrupt pixel data: {0}")]
    CorruptData(String),
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("largest component boundary has only {0} pixel(s)")]
    ComponentTooSmall(usize),
    #[error("fewer than 3 vertices would remain")]
    CollapsedPolygon,

    // dce
    #[error("simplification target {0} is below 3")]
    TargetTooSmall(usize),
    #[error("no vertex can be removed without creating a self-intersection ({0} vertices left)")]
    SimplificationStuck(usize),

    // descriptors
    #[error("granularity must be at least 1")]
    InvalidGranularity,
    #[error("distance ratio must be finite and positive, got {0}")]
    NonPositiveRatio(f64),
    #[error("label shift {shift} out of range for {n} vertices")]
    ShiftOutOfRange { shift: usize, n: usize },
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),

    // similarity
    #[error("shapes differ: n {n_a} vs {n_b}, m {m_a} vs {m_b}")]
    ShapeMismatch {
        n_a: usize,
        n_b: usize,
        m_a: u32,
        m_b: u32,
    },
    #[error("mean direction error is zero; weights are undefined")]
    ZeroDirectionError,

    // reconstruction
    #[error("candidate is degenerate: {0}")]
    DegenerateCandidate(String),
    #[error("evaluation budget is zero")]
    BudgetTooSmall,
    #[error("invalid search parameters: {0}")]
    InvalidParams(String),

    // corpus
    #[error("corpus needs at least 2 usable shapes, found {0}")]
    EmptyCorpus(usize),
    #[error("all {0} corpus files failed to process")]
    AllEntriesFailed(usize),
    #[error("corpus mixes vertex counts or granularities")]
    HeterogeneousCorpus,
    #[error("top-k must be at least 1")]
    InvalidTopK,
    #[error("nothing to render")]
    NothingToRender,

    // io
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("polygon file, line {line}: {msg}")]
    PolyParse { line: usize, msg: String },
    #[error("descriptor json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
