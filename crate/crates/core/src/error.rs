use thiserror::Error;

/// Errors raised by constructors and pointwise analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("tangent vectors are based at different points")]
    BaseMismatch,

    #[error("immersion is rank deficient (Gram determinant {0:e})")]
    RankDeficient(f64),

    #[error("chart is not conformal (|E-G| = {e_minus_g:e}, |F| = {f:e})")]
    NonConformal { e_minus_g: f64, f: f64 },

    #[error("mean curvature vanishes")]
    ZeroMeanCurvature,

    #[error("point ({x}, {y}) lies outside the chart domain")]
    OutOfDomain { x: f64, y: f64 },

    #[error("pseudo-umbilical point: adapted frame undefined")]
    PseudoUmbilical,

    #[error("adapted frame is discontinuous inside the stencil")]
    FrameDiscontinuity,

    #[error("third-order jet required")]
    JetOrder,

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
