use std::fmt;

use thiserror::Error;

use crate::newton::NewtonReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a curve cannot be used as the old time level of a step.
#[derive(Debug, Clone, PartialEq)]
pub enum Inadmissible {
    /// `x1 <= 0` at a node that must lie off the axis.
    NonPositiveRadius { node: usize, x1: f64 },
    /// Endpoint of an open curve is not on the axis.
    EndpointOffAxis { node: usize, x1: f64 },
    /// Two consecutive nodes coincide.
    ZeroLengthElement { element: usize },
    /// Coordinates are not finite.
    NonFinite { node: usize },
}

impl fmt::Display for Inadmissible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveRadius { node, x1 } => {
                write!(f, "x1 = {x1:e} is not positive at node {node}")
            }
            Self::EndpointOffAxis { node, x1 } => {
                write!(f, "endpoint {node} is off the axis (x1 = {x1:e})")
            }
            Self::ZeroLengthElement { element } => write!(f, "element {element} has zero length"),
            Self::NonFinite { node } => write!(f, "non-finite coordinates at node {node}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inadmissible curve: {0}")]
    Inadmissible(Inadmissible),

    #[error("singular system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("system matrix is not positive definite: pivot {pivot:e} at row {row}")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("Newton iteration failed: {0}")]
    NewtonFailed(Box<NewtonReport>),

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("degenerate mesh: minimal element length is {0:e}")]
    DegenerateMesh(f64),

    #[error("time step {step} (t = {time}) failed: {source}")]
    StepFailed {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid bracket: r = {lo} and r = {hi} both end in {verdict}")]
    InvalidBracket { lo: f64, hi: f64, verdict: String },

    #[error("run for r = {r} reached t = {time} without a singularity verdict")]
    Inconclusive { r: f64, time: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Self::InvalidParameter(msg.into())
    }

    /// True for failures caused by the numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Self::StepFailed { .. }
            | Self::SingularSystem { .. }
            | Self::NotPositiveDefinite { .. }
            | Self::NewtonFailed(_)
            | Self::Inadmissible(_)
            | Self::DegenerateMesh(_)
            | Self::Inconclusive { .. } => true,
            _ => false,
        }
    }
}

impl From<Inadmissible> for Error {
    fn from(value: Inadmissible) -> Self {
        Self::Inadmissible(value)
    }
}
