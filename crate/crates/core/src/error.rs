use num_complex::Complex64;
use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum DiscError {
    #[error("point {0} is not inside the unit disc")]
    OutsideDisc(Complex64),

    #[error("zero {0} is listed more than once; pass a multiplicity instead")]
    Multiplicity(Complex64),

    #[error("derivative vanishes at {0} (|w'| = {1:e}); Schwarzian undefined")]
    CriticalPoint(Complex64, f64),

    #[error("smoothness condition violated: ratio estimate {0:e} exceeds cap")]
    SmoothnessViolated(f64),

    #[error("gauge is not a non-increasing map into (0,1): {0}")]
    InvalidGauge(String),

    #[error("oracle evaluation failed at {point}: {reason}")]
    Oracle { point: Complex64, reason: String },

    #[error("power series did not converge at {0} even at the minimum step radius")]
    StepSize(Complex64),

    #[error("continuation failed near {0}: step radius fell below 1e-6")]
    Continuation(Complex64),

    #[error("function is (numerically) zero on the contour near {0}")]
    ZeroOnContour(Complex64),

    #[error("winding number {0} is not close to an integer")]
    NonIntegerWinding(f64),

    #[error("Newton iteration did not converge in cell around {0}")]
    NewtonFailure(Complex64),

    #[error("all Taylor coefficients at {0} are below the noise floor")]
    Degenerate(Complex64),

    #[error("function is not real on the real axis near {0}")]
    NotReal(Complex64),

    #[error("Pick matrix too ill-conditioned (condition {0:e}); prune nearby nodes")]
    PickConditioning(f64),

    #[error("interpolation nodes must be distinct (nodes {0} and {1})")]
    CoincidentNodes(usize, usize),

    #[error("interpolation residual {0:e} exceeds tolerance")]
    InterpolationResidual(f64),

    #[error("corona lower bound {0:e} is below 1e-6")]
    CoronaCondition(f64),

    #[error("exponent {alpha} is not above the required threshold {threshold}")]
    ExponentBelowThreshold { alpha: f64, threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, DiscError>;
