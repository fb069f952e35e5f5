use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex index {index} out of range for graph on {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),

    #[error("mapping is not a bijection on 0..{n}: {reason}")]
    NotABijection { n: usize, reason: String },

    #[error("invalid generator parameters for {family}: {reason}")]
    InvalidParameters { family: String, reason: String },

    #[error("could not parse generator expression {expr:?}: {reason}")]
    GeneratorSyntax { expr: String, reason: String },

    #[error("random regular graph rejection budget exhausted after {attempts} pairings")]
    RejectionBudget { attempts: usize },

    #[error("graph6: {0}")]
    Graph6(String),

    #[error("{path}:{line}: {reason}")]
    FamilyLine {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("DRESS did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("deletion of {subset:?}: {source}")]
    Deletion {
        subset: Vec<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("deletion depth {k} exceeds vertex count {n}")]
    DepthTooLarge { k: usize, n: usize },

    #[error("WL refinement on {n}^{k} tuples exceeds the table cap of {cap}")]
    MemoryGuard { n: usize, k: usize, cap: usize },

    #[error("unsupported WL method: {0}")]
    UnsupportedMethod(String),

    #[error("{0}")]
    Harness(String),

    #[error("fingerprint container: {0}")]
    Container(String),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerical computation itself, as opposed to
    /// bad input or I/O.
    pub fn is_compute_error(&self) -> bool {
        match self {
            Error::NotConverged { .. } | Error::MemoryGuard { .. } => true,
            Error::Deletion { source, .. } => source.is_compute_error(),
            _ => false,
        }
    }
}
