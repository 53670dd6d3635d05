use thiserror::Error;

/// Errors raised anywhere in the honeycomb toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice size: {0}")]
    Size(String),

    #[error("unknown {kind} {index}")]
    Lookup { kind: &'static str, index: usize },

    #[error("register error: {0}")]
    Register(String),

    #[error("{spins} spins exceeds the exact-diagonalization ceiling of {ceiling}; use the Majorana solver for larger lattices")]
    Resource { spins: usize, ceiling: usize },

    #[error("eigensolver did not converge after {iterations} iterations (max residual {max_residual:.3e})")]
    Convergence {
        iterations: usize,
        max_residual: f64,
        residuals: Vec<f64>,
    },

    #[error("inconsistent flux pattern: {0}")]
    Constraint(String),

    #[error("flux sectors are only defined at zero field: {0}")]
    UnsupportedSector(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
