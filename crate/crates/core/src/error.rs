use thiserror::Error;

/// Errors raised by evaluators, quadrature, root location and audits.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zeta has a pole at s = 1")]
    Pole,

    #[error("outside the supported domain: {0}")]
    OutOfDomain(String),

    #[error("target error {target:e} unreachable at working precision (best bound {achieved:e})")]
    PrecisionExhausted { target: f64, achieved: f64 },

    #[error("series converges too slowly: {0}")]
    SlowConvergence(String),

    #[error("branch obstruction near {re} + {im}i: |zeta| = {modulus:e}")]
    BranchObstruction { re: f64, im: f64, modulus: f64 },

    #[error("boundary obstruction: |f - a| = {modulus:e} on the contour at {re} + {im}i")]
    BoundaryObstruction { re: f64, im: f64, modulus: f64 },

    #[error("no convergence with {nodes} nodes: estimate {estimate}, achieved error {achieved:e}")]
    NoConvergence { estimate: f64, achieved: f64, nodes: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("located points carry total multiplicity {found} but the winding count is {expected}")]
    LocateMismatch { found: u32, expected: u32 },

    #[error("non-monotone sample at x = {0}")]
    NonMonotone(f64),

    #[error("formula evaluation failed: {0}")]
    Formula(String),
}

pub type Result<T> = std::result::Result<T, Error>;
