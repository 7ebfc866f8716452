use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// (N, p) outside 1 <= N <= 3, 0 < p < 2* - 2.
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Neither end of the shooting bracket classifies as expected.
    #[error("no sign-definite decaying solution in shooting bracket [{lo}, {hi}]: {reason}")]
    NoBracket { lo: f64, hi: f64, reason: String },

    #[error("shooting did not converge: {0}")]
    ShootingDiverged(String),

    /// The truncated integral misses more than the allowed tail fraction.
    #[error("quadrature tail estimate {estimate:e} exceeds tolerance {tol:e}; enlarge the truncation radius")]
    TailTooLarge { estimate: f64, tol: f64 },

    /// Halving the quadrature step moved an integral by more than the tolerance.
    #[error("grid too coarse: Richardson estimate {estimate:e} exceeds {tol:e} for {quantity}")]
    GridTooCoarse { quantity: &'static str, estimate: f64, tol: f64 },

    #[error("f_p has no interior negative minimum (c = {c}, threshold c* = {threshold})")]
    NoNegativeMinimum { c: f64, threshold: f64 },

    #[error("no mountain pass geometry: {0}")]
    NoMountainPass(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),
}
