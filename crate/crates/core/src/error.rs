use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, FemError>;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("nonconforming input: {0}")]
    NonconformingMesh(String),

    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },

    #[error("coefficient must be positive, got {0}")]
    NonPositiveCoefficient(f64),

    #[error("no coefficient assigned to subdomain {0}")]
    MissingSubdomain(usize),

    #[error("unsupported polynomial degree {0}")]
    UnsupportedDegree(usize),

    #[error("no convergence within {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("matrix not SPD (breakdown at iteration {iteration})")]
    NotSpd { iteration: usize },

    #[error("indefinite system (increase gamma)")]
    Indefinite,

    #[error("unknown problem '{0}'")]
    UnknownProblem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("level {level}: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<FemError>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
