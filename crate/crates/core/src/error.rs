use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("facet {index}: {rule}")]
    InvalidFacet { index: usize, rule: String },

    #[error("invalid material `{name}`: {msg}")]
    InvalidMaterial { name: String, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("tracing pair (tx {tx}, rx {rx}) failed")]
    Pair {
        tx: usize,
        rx: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("serving RU {serving} is not part of the deployment")]
    ServingNotDeployed { serving: usize },

    #[error("invalid deployment: {0}")]
    InvalidDeployment(String),

    #[error(
        "exhaustive search over C({n}, {m}) = {count} deployments exceeds the limit of {limit}; use the greedy strategy"
    )]
    CombinatorialLimit {
        n: usize,
        m: usize,
        count: u128,
        limit: u128,
    },

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("codec: {0}")]
    Codec(String),

    #[error("empty series `{0}`")]
    EmptySeries(String),

    #[error("{}: row {row}: {msg}", path.display())]
    Schema {
        path: PathBuf,
        row: usize,
        msg: String,
    },

    #[error("I/O error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
