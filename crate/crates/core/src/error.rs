use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("empty graph file: {path}")]
    EmptyFile { path: PathBuf },

    #[error("invalid parameter `{name}`: {msg}")]
    InvalidParam { name: &'static str, msg: String },

    #[error("graph too large for dense form: n={n} exceeds cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("statistic undefined: {0}")]
    UndefinedStat(&'static str),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver did not converge: best residual {best_residual:.3e} after {iterations} iterations")]
    NoConvergence {
        best_residual: f64,
        iterations: usize,
    },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("corpus entry `{entry}` failed: {source}")]
    Corpus { entry: String, source: Box<Error> },

    #[error("pipeline aborted: {failed} of {total} graphs failed (tolerance {tolerance_pct:.1}%)")]
    PipelineAborted {
        failed: usize,
        total: usize,
        tolerance_pct: f64,
    },
}

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Caller passed invalid parameters (exit code 1).
    Usage,
    /// Input data is missing, malformed, or out of capacity (exit code 2).
    Data,
    /// A numerical routine failed to converge or is degenerate (exit code 3).
    Numerical,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidParam { .. } => ErrorCategory::Usage,
            Error::NoConvergence { .. } | Error::DegenerateSpectrum(_) => ErrorCategory::Numerical,
            Error::Corpus { source, .. } => source.category(),
            _ => ErrorCategory::Data,
        }
    }

    pub(crate) fn invalid_param(name: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
