use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate bivariate density: |rho| = {0} must be < 1")]
    DegenerateDensity(f64),
    #[error("invalid source configuration: {0}")]
    InvalidSource(String),
    #[error("invalid crossover probability {0}: must lie in [0, 0.5)")]
    InvalidNoise(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid codebook: {0}")]
    InvalidCodebook(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}
