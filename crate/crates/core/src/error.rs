use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("occupation {value} at site {site} is outside [0, {local_dim})")]
    OccupationOutOfRange {
        site: usize,
        value: usize,
        local_dim: usize,
    },

    #[error("Hilbert space {local_dim}^{n_sites} exceeds the supported dimension")]
    DimensionOverflow { n_sites: usize, local_dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("operator is not Hermitian (max |A - A^dag| = {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("infeasible design: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
