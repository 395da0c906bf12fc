use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("point with norm {0} is outside the admissible region of the ball")]
    OutsideBall(f64),
    #[error("weight exponent {0} is not integrable near the sphere")]
    NonIntegrableWeight(f64),
    #[error("argument {0} hits a pole of the gamma function")]
    Pole(f64),
    #[error("argument {0} lies outside [-1, 1]")]
    Domain(f64),
    #[error("gegenbauer index {0} must exceed -1/2")]
    GegenbauerIndex(f64),
    #[error("at least {min} quadrature points are required, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("|x||y| = {rho} exceeds the certified radius {rho_max}")]
    RhoExceeded { rho: f64, rho_max: f64 },
    #[error("rho = {0} must lie in [0, 1)")]
    InvalidRho(f64),
    #[error("truncation at degree {k_max} leaves a certified tail of {tail:e} above {tol:e}")]
    TailNotMet { k_max: usize, tail: f64, tol: f64 },
    #[error("quadrature did not stabilise: {0}")]
    NonConvergence(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parameters lie outside the admissible region: {0}")]
    OutsideRegion(String),
    #[error("search floor reached at epsilon = {0}")]
    SearchFloor(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
