use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Non-convergence of a quadrature is not an error: it is reported through
/// [`crate::means::MeanValue::converged`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("radius {radius} exceeds the safe evaluation radius {r_max} of a truncated series")]
    RadiusTooLarge { radius: f64, r_max: f64 },

    #[error("point {0} is not inside the unit disc")]
    OutsideDisc(String),

    #[error("division by z requires f(0) = 0, but |f(0)| = {0}")]
    NonvanishingAtZero(f64),

    #[error("norm diverges: {0}")]
    DivergentNorm(String),

    #[error("coefficient norm formula only exists for p = 2 spaces, got {0}")]
    UnsupportedSpace(String),

    #[error("profile has {0} usable points, at least 4 are required")]
    DegenerateProfile(usize),

    #[error("weight argument {0} is outside (0, 1)")]
    OutOfDomain(f64),

    #[error("integral of w(s)/s near 0 does not converge at working precision")]
    IntegralDiverges,

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("the second Dirichlet bridge inequality needs w != 0")]
    ZeroDilationParameter,

    #[error("modulus of continuity vanishes (constant function)")]
    ZeroModulus,

    #[error("function is not in {0}")]
    NotInSpace(String),

    #[error("hypotheses not satisfied: {0}")]
    Hypothesis(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid function spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
