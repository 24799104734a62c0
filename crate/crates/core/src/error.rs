use thiserror::Error;

/// Errors raised while ingesting data or evaluating metrics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing column `{0}` in CSV header")]
    MissingColumn(String),

    #[error("row {row}: label `{value}` is not 0 or 1")]
    NonBinaryLabel { row: usize, value: String },

    #[error("row {row}: score {value} is outside [0, 1]")]
    ScoreOutOfRange { row: usize, value: String },

    #[error("dataset has no rows")]
    EmptyDataset,

    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },

    #[error("labels and scores have different lengths ({labels} vs {scores})")]
    LengthMismatch { labels: usize, scores: usize },

    #[error("metric requires both classes but the {0} class is empty")]
    DegenerateClass(&'static str),

    #[error("invalid threshold interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("interval [{a}, {b}] touches 0 or 1; a strictly interior interval is required")]
    IntervalAtBoundary { a: f64, b: f64 },

    #[error("threshold {0} must lie strictly inside (0, 1)")]
    ThresholdAtBoundary(f64),

    #[error("weight diverges on [{a}, {b}]")]
    NonIntegrable { a: f64, b: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("models do not share the same label column")]
    LabelMismatch,

    #[error("invalid curve spec: {0}")]
    CurveSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the underlying byte stream rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
