use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("{routine} did not converge (info = {info}) on {dim}x{dim} matrix, fingerprint {fingerprint:016x}")]
    NoConvergence {
        routine: &'static str,
        info: i32,
        dim: usize,
        fingerprint: u64,
    },

    #[error("{routine} rejected argument {arg}")]
    LapackArgument { routine: &'static str, arg: i32 },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("degenerate leading eigenvalue: |z2| = {subleading:.12}")]
    DegenerateLeadingEigenvalue { subleading: f64 },

    #[error("map is not Hermiticity-preserving: imaginary residue {residue:.3e}")]
    ImaginaryResidue { residue: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("mixed dimensions in input: {first} and {other}")]
    MixedDimensions { first: usize, other: usize },

    #[error("too few points above floor for a fit: {usable} usable, {required} required")]
    TooFewPoints { usable: usize, required: usize },

    #[error("quadrature did not reach tolerance (error estimate {error_estimate:.3e})")]
    Quadrature { error_estimate: f64 },

    #[error("invalid configuration:\n  - {}", errors.join("\n  - "))]
    InvalidConfig { errors: Vec<String> },

    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialization(String),
}
