use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("input group not closed / generators dependent: {0}")]
    NotClosed(String),
    #[error("ill-conditioned generator system (condition number {0:.3e})")]
    IllConditioned(f64),
    #[error("discrete part not isotropic: pairing {0} is not an integer multiple of 2π t")]
    NotIsotropic(f64),
    #[error("group is not Lagrangian (normal form requires G = G^σ)")]
    NotLagrangian,
    #[error("elementary divisor {0} != 1 in skew normal form (G is a proper subgroup of G^σ)")]
    ElementaryDivisor(i64),
    #[error("integer overflow in lattice reduction")]
    Overflow,
    #[error("no convergence in {what}: refinement difference {diff:.3e} exceeds {tol:.3e}")]
    NonConvergence { what: String, diff: f64, tol: f64 },
    #[error("overflow guard: |z|^2 = {0:.3} exceeds the accuracy budget of the truncation")]
    OverflowGuard(f64),
    #[error("symbol is not integrable: {0}")]
    NotIntegrable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("quadrature produced a non-positive weight {0:.3e}")]
    NonPositive(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for this failure: 2 invalid input, 3 precondition violation,
    /// 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. } | Error::InvalidInput(_) | Error::NotClosed(_) => 2,
            Error::NotIsotropic(_)
            | Error::NotLagrangian
            | Error::ElementaryDivisor(_)
            | Error::NotIntegrable(_)
            | Error::Unsupported(_) => 3,
            Error::IllConditioned(_)
            | Error::Overflow
            | Error::NonConvergence { .. }
            | Error::OverflowGuard(_)
            | Error::NonPositive(_) => 4,
        }
    }
}
