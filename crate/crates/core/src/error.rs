use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("cell {cell} is not convex: {detail}")]
    NonConvex { cell: usize, detail: String },

    #[error("vertex {0} is not an interior vertex")]
    NotInteriorVertex(usize),

    #[error("edge {0} is not an interior edge")]
    NotInteriorEdge(usize),

    #[error("operation requires a {expected}D mesh, got {actual}D")]
    Dimension { expected: usize, actual: usize },

    #[error("coefficient matrix on cell {cell} is not symmetric positive definite")]
    CoefficientNotSpd { cell: usize },

    #[error("matrix is not symmetric positive definite ({context})")]
    NotSpd { context: String },

    #[error("conjugate gradients did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("linear system is singular: {0}")]
    Singular(String),

    #[error("no system of distinct representatives for interior vertex {vertex}")]
    Structural { vertex: usize },

    #[error("dual graph is disconnected: cell {cell} is unreachable from cell 0")]
    DisconnectedDualGraph { cell: usize },

    #[error("dimension mismatch: {0}")]
    Shape(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
