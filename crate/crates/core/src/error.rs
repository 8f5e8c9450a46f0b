use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter or configuration value violates a documented invariant.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate domain: l1 = {l1}, l2 = {l2}, N = {n}")]
    DegenerateDomain { l1: f64, l2: f64, n: usize },

    #[error("singular matrix: zero pivot at row {pivot}")]
    SingularMatrix { pivot: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time step {tau:e} exceeds the stability bound {tau_max:e}")]
    StabilityViolation { tau: f64, tau_max: f64 },

    #[error("non-finite value produced at step {step}")]
    NonFinite { step: usize },

    #[error("mollifier radius {delta} too large for a domain of length {length}")]
    DeltaTooLarge { delta: f64, length: f64 },

    #[error("bracket [{lo}, {hi}] does not contain enough bistable pressures")]
    BracketInvalid { lo: f64, hi: f64 },

    #[error("energy difference does not change sign over [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("no equilibrium found in the search box")]
    NoEquilibrium,

    #[error("continuation failed at k2 = {k2}: {source}")]
    Continuation {
        k2: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors that reject an input rather than report a solver failure.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::DegenerateDomain { .. }
                | Error::DimensionMismatch { .. }
                | Error::StabilityViolation { .. }
                | Error::DeltaTooLarge { .. }
                | Error::BracketInvalid { .. }
                | Error::NoSignChange { .. }
                | Error::UnknownStrategy { .. }
        )
    }
}
