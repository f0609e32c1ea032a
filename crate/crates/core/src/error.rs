use thiserror::Error;

use crate::geometry::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cloud contains no inclusions")]
    EmptyCloud,

    #[error("unknown material `{0}`")]
    UnknownMaterial(String),

    #[error("inadmissible cluster: {0}")]
    Validation(Box<ValidationReport>),

    #[error("background field {background} is not compatible with a {domain} domain")]
    IncompatibleBackground {
        background: &'static str,
        domain: &'static str,
    },

    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,

    #[error("point ({x}, {y}, {z}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64, z: f64 },

    #[error("interaction system is singular or numerically rank deficient")]
    SingularSystem,

    #[error("dense solve needs {unknowns} unknowns, above the cap of {cap}")]
    TooLarge { unknowns: usize, cap: usize },

    #[error(
        "fixed-point iteration diverged after {sweeps} sweeps \
         (residual ratio {ratio:.3} per sweep); try the direct solver"
    )]
    Divergence {
        sweeps: usize,
        ratio: f64,
        residual: f64,
    },

    #[error("fixed-point iteration did not reach tolerance in {sweeps} sweeps (relative residual {relative_residual:.3e})")]
    MaxIterations {
        sweeps: usize,
        relative_residual: f64,
    },

    #[error("coefficient set has {found} vectors, cloud has {expected} inclusions")]
    CoefficientMismatch { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn outside(x: &crate::Vec3) -> Self {
        Error::OutsideDomain {
            x: x.x,
            y: x.y,
            z: x.z,
        }
    }

    /// True for failures of the numerical model (validation, solver), as
    /// opposed to I/O or parse problems.
    pub fn is_model_failure(&self) -> bool {
        !matches!(
            self,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Parse(_) | Error::UnknownMaterial(_)
        )
    }
}
