// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("module `{0}` has no position")]
    Unplaced(String),

    #[error("net degree must be at least 1")]
    ZeroDegree,

    #[error("path needs at least two vertices, got {0}")]
    ShortPath(usize),

    #[error("net `{0}` does not exist")]
    MissingNet(String),

    #[error("pin of module `{module}` is not at a grid-cell center ({x}, {y})")]
    NotGridIntegral { module: String, x: f64, y: f64 },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("white-space insertion fell short by {remaining} cells")]
    WhiteSpaceShortfall { remaining: usize },

    #[error("net-degree budget exhausted with {frontier} unconnected vertices left")]
    BudgetExhausted { frontier: usize },

    #[error("backbone could not connect {unconnected} vertices")]
    Stalled { unconnected: usize },

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("brute-force limits exceeded: {0}")]
    OracleLimits(String),

    #[error("module sets differ; only in first: {only_left:?}, only in second: {only_right:?}")]
    ModuleMismatch { only_left: Vec<String>, only_right: Vec<String> },

    #[error("quality ratio needs a positive bound, got {0}")]
    ZeroBound(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
