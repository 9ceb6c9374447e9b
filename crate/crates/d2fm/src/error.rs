//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("csv/io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv parse failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("checkpoint serialization failure: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid date `{0}` (expected YYYY-MM or YYYY-MM-DD)")]
    BadDate(String),
    #[error("duplicate date {0} in data file")]
    DuplicateDate(String),
    #[error("non-monthly gap between {0} and {1} in data file")]
    DateGap(String, String),
    #[error("unknown/missing series: {0}")]
    SeriesMismatch(String),
    #[error("series {code}: quarterly value at non-quarter-ending month {month}")]
    QuarterlySlot { code: String, month: String },
    #[error("series {code}: invalid metadata ({reason})")]
    BadMeta { code: String, reason: String },

    #[error("unknown tcode {0} (expected 1-6)")]
    UnknownTcode(u8),
    #[error("non-positive value {value} at index {index} under a log transform")]
    NonPositiveLog { index: usize, value: f64 },
    #[error("series too short for tcode {tcode}: length {len}, need >= {need}")]
    SeriesTooShort { tcode: u8, len: usize, need: usize },

    #[error("series {0}: zero variance in the fitting window")]
    ZeroVariance(String),
    #[error("series {0}: fewer than 2 observed points in the fitting window")]
    TooFewObserved(String),
    #[error("spline interpolation needs >= 2 observed points, got {0}")]
    SplineTooFew(usize),

    #[error("unstable VAR specification: companion spectral radius {0:.4} >= 1")]
    UnstableVar(f64),
    #[error("insufficient contiguous data for AR({order}) fit: {rows} usable windows, need >= {need}")]
    InsufficientArData { order: usize, rows: usize, need: usize },
    #[error("non-stationary AR model (spectral radius {0:.4})")]
    NonStationaryAr(f64),
    #[error("rank-deficient regressor matrix in least-squares fit")]
    RankDeficient,

    #[error("encoder input width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("batch normalization needs batch size >= 2 in train mode, got {0}")]
    BatchTooSmall(usize),
    #[error("invalid encoder spec: {0}")]
    BadEncoderSpec(String),
    #[error("aggregation window must hold exactly 5 monthly values, got {0}")]
    BadAggregationWindow(usize),
    #[error("aggregation window crosses the start of the sample")]
    WindowBeforeSample,
    #[error("loss undefined: every entry is masked out")]
    AllMasked,
    #[error("non-finite values encountered in {0} (divergence)")]
    NonFinite(&'static str),

    #[error("invalid training config: {0}")]
    BadTrainConfig(String),
    #[error("pretraining found no usable rows after the fallback rule")]
    NoUsableRows,

    #[error("state-space covariance is not positive semidefinite")]
    NotPsd,
    #[error("idiosyncratic state space supports AR(1) only, got order {0}")]
    IdioOrderUnsupported(usize),

    #[error("insufficient target history at {as_of}: {got} observations, need >= {need}")]
    InsufficientHistory {
        as_of: String,
        got: usize,
        need: usize,
    },
    #[error("forecast record for series {series} at {period} has no realized actual")]
    UnmatchedRecord { series: String, period: String },
    #[error("cross-validation grid is empty")]
    EmptyGrid,
    #[error("infeasible cross-validation folds: {0}")]
    InfeasibleFolds(String),
    #[error("composite indicator undefined: loadings matrix is zero")]
    ZeroLoadings,
    #[error("unknown series code `{0}`")]
    UnknownSeries(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
