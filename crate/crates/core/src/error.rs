use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("potential has no double-well structure along y = 0")]
    NoDoubleWell,
    #[error("orbital {0} has no mirror partner")]
    UnpairedOrbital(usize),
    #[error("quadrature did not converge: {what} (last change {change:e})")]
    QuadratureNotConverged { what: String, change: f64 },
    #[error("overlap matrix is singular (smallest eigenvalue {0:e})")]
    SingularOverlap(f64),
    #[error("optimizer did not converge after {0} evaluations")]
    OptimizerDidNotConverge(usize),
    #[error("SCF did not converge after {iterations} iterations (last energy change {delta:e} meV)")]
    ScfNotConverged { iterations: usize, delta: f64 },
    #[error("eigensolver did not converge (residual {0:e})")]
    EigensolverNotConverged(f64),
    #[error("exchange coupling is zero")]
    ZeroCoupling,
    #[error("sweep has no spread in the control variable")]
    DegenerateSweep,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
