use thiserror::Error;

/// Errors raised by the numerical kernels, the physics layers and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("matrix is not hermitian: max |M - M^H| = {violation:e} exceeds tolerance {tol:e}")]
    NonHermitianInput { violation: f64, tol: f64 },

    #[error("least-squares fit is degenerate: {0}")]
    FitDegenerate(String),

    #[error("invalid filling: {n_fermions} fermions on {n_sites} sites")]
    InvalidFilling { n_fermions: usize, n_sites: usize },

    #[error("correlation spectrum value {value:e} lies outside [0, 1] beyond tolerance")]
    SpectrumOutOfRange { value: f64 },

    #[error("averaging window [{start}, {end}] is out of range for a trace of {len} periods")]
    WindowOutOfRange { start: usize, end: usize, len: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the CLI: 2 configuration, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::InvalidFilling { .. }
            | Error::WindowOutOfRange { .. } => 2,
            Error::Io(_) => 4,
            Error::DegenerateState(_)
            | Error::NonHermitianInput { .. }
            | Error::FitDegenerate(_)
            | Error::SpectrumOutOfRange { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
