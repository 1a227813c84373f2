use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("leading coefficient is numerically zero")]
    DegenerateLeadingCoefficient,
    #[error("polynomial degree {0} outside 1..=4")]
    InvalidDegree(usize),
    #[error("iteration did not converge: {0}")]
    NonConvergence(&'static str),
    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
    #[error("matrix is numerically singular")]
    SingularMatrix,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("s0 = {found} is inconsistent with t (expected {expected})")]
    InconsistentS0 { expected: String, found: String },
    #[error("matrices do not share a common trace")]
    TraceMismatch,
    #[error("triple constraint 2*s123^2 + det S = 0 violated (residual {0:.3e})")]
    ConstraintViolated(f64),
    #[error("|s123| = {0:.3e} too small to realize a triple")]
    SmallS123(f64),
    #[error("symmetric factorization hit an all-zero pivot block")]
    FactorizationFailure,
    #[error("type II relations violated (residual {0:.3e})")]
    TypeIIViolated(f64),
    #[error("implied s44 differs from s0 (residual {0:.3e})")]
    S44Mismatch(f64),
    #[error("no realization strategy applies: {0}")]
    DegenerateCharacter(String),
    #[error("parameter excluded for {component}: {reason}")]
    ExcludedParameter { component: String, reason: String },
}
