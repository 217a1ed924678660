use std::path::PathBuf;

/// Errors raised by the detectors, generators, metrics and the harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// `binomial(p + d, d)` does not fit in a `usize`, or is too large to
    /// allocate an `s × s` matrix for.
    #[error("monomial basis for p={p}, d={d} is too large to represent")]
    BasisTooLarge { p: usize, d: usize },

    #[error("invalid basis parameters: {0}")]
    InvalidBasis(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Cholesky factorization failed even after escalating the
    /// regularization. `min_pivot` is the smallest pivot seen on the
    /// last attempt, an estimate of the smallest eigenvalue.
    #[error(
        "moment matrix is numerically singular (epsilon={epsilon:e}, smallest pivot {min_pivot:e})"
    )]
    Singular { epsilon: f64, min_pivot: f64 },

    /// The Sherman–Morrison denominator fell below tolerance; the caller
    /// should fall back to a direct re-inversion.
    #[error("rank-one inverse update is ill-conditioned (denominator {denominator:e})")]
    IllConditioned { denominator: f64 },

    #[error("model has not been fitted")]
    NotFitted,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error("malformed CSV at row {row}: {message}")]
    MalformedCsv { row: usize, message: String },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Short class name used by the CLI when reporting failures.
    pub fn class(&self) -> &'static str {
        match self {
            Error::BasisTooLarge { .. } | Error::InvalidBasis(_) => "BasisError",
            Error::Dimension { .. } => "InputError",
            Error::Singular { .. } | Error::IllConditioned { .. } => "NumericalError",
            Error::NotFitted | Error::Contract(_) => "ContractError",
            Error::UndefinedMetric(_) => "MetricError",
            Error::Config { .. } | Error::Parse { .. } => "ConfigError",
            Error::Snapshot(_) => "SnapshotError",
            Error::MalformedCsv { .. } | Error::Csv(_) => "CsvError",
            Error::Read { .. } | Error::Write { .. } | Error::Io(_) => "IoError",
        }
    }

    /// Process exit code associated with [`Error::class`].
    pub fn exit_code(&self) -> u8 {
        match self.class() {
            "ConfigError" => 2,
            "IoError" => 3,
            "CsvError" => 4,
            "NumericalError" => 5,
            "MetricError" => 6,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
