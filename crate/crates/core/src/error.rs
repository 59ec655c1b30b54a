use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid series `{name}`: {reason}")]
    InvalidSeries { name: String, reason: String },

    #[error("alignment error: series `{series}` shares no dates with the rest of the panel")]
    Alignment { series: String },

    #[error("transform error: `{series}` has nonpositive value {value} on {date} under log")]
    Transform {
        series: String,
        date: NaiveDate,
        value: f64,
    },

    #[error("shift error: |{shift}| must be smaller than the length {len} of `{series}`")]
    Shift {
        series: String,
        shift: i64,
        len: usize,
    },

    #[error("diff error: `{series}` needs at least 2 observations, has {len}")]
    Diff { series: String, len: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("missing input file {path} (source: {source_url})")]
    MissingFile { path: PathBuf, source_url: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("sample too small: {rows} rows, need at least {required}")]
    SampleTooSmall { rows: usize, required: usize },

    #[error("degrees of freedom exhausted: {observations} observations for {parameters} parameters")]
    DegreesOfFreedom {
        observations: usize,
        parameters: usize,
    },

    #[error("singular design: column `{column}` is collinear with the preceding columns")]
    SingularDesign { column: String },

    #[error("invalid design: {0}")]
    Design(String),

    #[error("sample mismatch: unrestricted fit has {unrestricted} rows, restricted has {restricted}")]
    SampleMismatch {
        unrestricted: usize,
        restricted: usize,
    },

    #[error("degenerate regression: {0}")]
    Degenerate(String),

    #[error("model specification error: {0}")]
    Spec(String),

    #[error("normalization error: level coefficient on the dependent variable is exactly zero")]
    Normalization,

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown DGP `{0}`")]
    UnknownDgp(String),
}

impl Error {
    /// Short machine-parseable category, used by the CLI on failure.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidSeries { .. } => "invalid_series",
            Error::Alignment { .. } => "alignment",
            Error::Transform { .. } => "transform",
            Error::Shift { .. } => "shift",
            Error::Diff { .. } => "diff",
            Error::Empty(_) => "empty_input",
            Error::Parse { .. } => "parse",
            Error::Data(_) => "data",
            Error::MissingFile { .. } => "missing_file",
            Error::Io { .. } => "io",
            Error::SampleTooSmall { .. } => "sample_too_small",
            Error::DegreesOfFreedom { .. } => "degrees_of_freedom",
            Error::SingularDesign { .. } => "singular_design",
            Error::Design(_) => "design",
            Error::SampleMismatch { .. } => "sample_mismatch",
            Error::Degenerate(_) => "degenerate",
            Error::Spec(_) => "spec",
            Error::Normalization => "normalization",
            Error::Config(_) => "config",
            Error::UnknownDgp(_) => "unknown_dgp",
        }
    }
}
