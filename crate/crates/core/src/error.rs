use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("precision must be in 1..=126 bits, got {0}")]
    Precision(u32),
    #[error("value does not fit the fixed-point range")]
    Overflow,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("random tape exhausted: needed {needed} bits at offset {offset}, tape holds {len}")]
    TapeExhausted { needed: usize, offset: usize, len: usize },
    #[error("invalid sampler parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle index {index} out of range (must be below 2^{bits})")]
    IndexOutOfRange { index: u64, bits: u32 },
    #[error("index component out of range: {0}")]
    Component(String),
    #[error("invalid key material: {0}")]
    Key(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("wire error: {0}")]
    Wire(String),
    #[error("ancilla register not clean: residual mass {0:e}")]
    Ancilla(f64),
    #[error("incomplete parameters: {0}")]
    IncompleteParams(String),
    #[error("statistics: {0}")]
    Stats(String),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
