use thiserror::Error;

/// Failures of the special-function evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("{what}: argument {value} outside the supported domain")]
    Domain { what: &'static str, value: f64 },
    #[error("gamma has a pole at {0}")]
    GammaPole(f64),
    #[error("Mittag-Leffler parameters out of range: rho = {rho}, mu = {mu}, x = {x}")]
    Parameters { rho: f64, mu: f64, x: f64 },
    #[error("Mittag-Leffler E({rho}, {mu}) at x = {x} did not reach the accuracy target (error estimate {estimate:e})")]
    NonConvergence { rho: f64, mu: f64, x: f64, estimate: f64 },
    #[error("argument {value} is below the certified asymptotic threshold {threshold}")]
    BelowThreshold { value: f64, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid integration interval [{0}, {1}]")]
    Interval(f64, f64),
    #[error("integrand returned a non-finite value at {0}")]
    NonFinite(f64),
    #[error("subdivision limit reached: estimate {value}, error {error:e}")]
    Limit { value: f64, error: f64 },
}

/// Crate-level error.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("initial datum vanishes identically")]
    ZeroInitialData,
    #[error("initial datum does not vanish on the boundary (max |phi| = {0:e})")]
    BoundaryIncompatible(f64),
    #[error("Delta_{k}(T = {t}, beta = {beta}) = {delta:e} is not positive: uniqueness of the forward problem is not guaranteed")]
    DeltaNotPositive { k: usize, t: f64, beta: f64, delta: f64 },
    #[error("singular gluing system for mode {k}: |Delta| = {delta:e} below floor {floor:e}")]
    SingularSystem { k: usize, delta: f64, floor: f64 },
    #[error("monotonicity audit failed for {what}: {detail}")]
    NotMonotone { what: String, detail: String },
    #[error("no solution: {0}")]
    Solvability(#[from] crate::inverse::Violation),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
