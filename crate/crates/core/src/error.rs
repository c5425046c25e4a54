use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("triangulation failed: {0}")]
    TriangulationFailure(String),

    #[error("vertex {vertex} has no neighbors; extrema are undefined on isolated vertices")]
    IsolatedVertex { vertex: usize },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("vertices {from} and {to} are not connected")]
    UnreachablePair { from: usize, to: usize },

    #[error("sifting diverged at iteration {iteration}: norm {norm:e} against initial norm {initial_norm:e}")]
    Divergence {
        iteration: usize,
        norm: f64,
        initial_norm: f64,
    },

    #[error("convergence hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("sifting does not converge: eigenvalue {re:.6e}{im:+.6e}i lies outside |1 - lambda| < 1 and is not zero")]
    NonConvergence { re: f64, im: f64 },

    #[error("window of length {window_length} covers no mass around vertex {vertex}")]
    WindowSupport { vertex: usize, window_length: f64 },

    #[error("signal has {extrema} extrema; at least 2 are needed to size a window")]
    OuterLoopTerminal { extrema: usize },

    #[error("window length rounds to zero (nu = {nu}, n = {n}, extrema = {extrema})")]
    WindowDegenerate { nu: f64, n: usize, extrema: usize },

    #[error("ingestion failed: {0}")]
    Ingestion(String),

    #[error("while extracting IMF {index}: {source}")]
    AtImf {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used for process exit codes and error reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    InvalidInput,
    Numeric,
    Io,
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_imf(self, index: usize) -> Self {
        match self {
            e @ Error::AtImf { .. } => e,
            e => Error::AtImf {
                index,
                source: Box::new(e),
            },
        }
    }

    /// Short stable identifier for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::TriangulationFailure(_) => "triangulation_failure",
            Error::IsolatedVertex { .. } => "isolated_vertex",
            Error::NumericFailure(_) => "numeric_failure",
            Error::UnreachablePair { .. } => "unreachable_pair",
            Error::Divergence { .. } => "divergence",
            Error::HypothesisViolation(_) => "hypothesis_violation",
            Error::NonConvergence { .. } => "non_convergence",
            Error::WindowSupport { .. } => "window_support",
            Error::OuterLoopTerminal { .. } => "outer_loop_terminal",
            Error::WindowDegenerate { .. } => "window_degenerate",
            Error::Ingestion(_) => "ingestion",
            Error::AtImf { source, .. } => source.kind(),
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidInput(_)
            | Error::TriangulationFailure(_)
            | Error::IsolatedVertex { .. }
            | Error::UnreachablePair { .. }
            | Error::WindowSupport { .. }
            | Error::OuterLoopTerminal { .. }
            | Error::WindowDegenerate { .. }
            | Error::Ingestion(_)
            | Error::Json(_) => ErrorClass::InvalidInput,
            Error::NumericFailure(_)
            | Error::Divergence { .. }
            | Error::HypothesisViolation(_)
            | Error::NonConvergence { .. } => ErrorClass::Numeric,
            Error::Io { .. } => ErrorClass::Io,
            Error::Csv(e) => {
                if e.is_io_error() {
                    ErrorClass::Io
                } else {
                    ErrorClass::InvalidInput
                }
            }
            Error::AtImf { source, .. } => source.class(),
        }
    }
}
