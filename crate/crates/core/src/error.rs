use std::path::PathBuf;

/// Errors produced by the gxwt library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("header error: {0}")]
    HeaderParse(String),

    /// `row` is the 1-based line number in the file (the header is line 1),
    /// `col` the 1-based column.
    #[error("non-numeric cell {value:?} at row {row}, column {col}")]
    NonNumericCell { row: usize, col: usize, value: String },

    #[error("non-uniform sampling: max relative jitter {max_jitter:.3e} exceeds 1e-6")]
    NonUniformSampling { max_jitter: f64 },

    #[error("series too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("selector matched no channels: {0}")]
    NoMatch(String),

    #[error("unknown channel: {0}")]
    UnknownName(String),

    #[error("channel selected more than once: {0}")]
    DuplicateChannel(String),

    #[error("selector syntax error on line {line}: {msg}")]
    SelectorSyntax { line: usize, msg: String },

    #[error("bad frequency range: fmin={fmin}, fmax={fmax}, voices={voices}")]
    BadRange { fmin: f64, fmax: f64, voices: u32 },

    #[error("fmax {fmax} Hz exceeds Nyquist frequency {nyquist} Hz")]
    NyquistExceeded { fmax: f64, nyquist: f64 },

    #[error("wavelet cycles must be >= 4, got {0}")]
    BadCycles(f64),

    #[error("frequency grids or sample rates differ")]
    GridMismatch,

    #[error("time lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("pairwise coupling needs equal channel counts, got {n_x} and {n_y}")]
    DimensionMismatch { n_x: usize, n_y: usize },

    #[error("empty fiber")]
    EmptyFiber,

    #[error("operation requires a full-variant transform")]
    VariantMismatch,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("bad simulation config: {0}")]
    BadConfig(String),

    #[error("band [{lo}, {hi}] Hz contains no grid frequency")]
    EmptyBand { lo: f64, hi: f64 },

    #[error("no valid points to average")]
    NoValidPoints,

    #[error("bad weights: {0}")]
    BadWeights(String),
}

impl Error {
    /// True for violations of numerical preconditions (as opposed to
    /// malformed or unreadable input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TooShort { .. }
                | Error::BadRange { .. }
                | Error::NyquistExceeded { .. }
                | Error::BadCycles(_)
                | Error::GridMismatch
                | Error::LengthMismatch(..)
                | Error::DimensionMismatch { .. }
                | Error::EmptyFiber
                | Error::VariantMismatch
                | Error::ShapeMismatch(_)
                | Error::BadConfig(_)
                | Error::EmptyBand { .. }
                | Error::NoValidPoints
                | Error::BadWeights(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
