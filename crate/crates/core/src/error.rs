use thiserror::Error;

/// Errors raised by the geometric and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular point at {at}: {what}")]
    SingularPoint { at: String, what: String },

    #[error("integration blew up at x = {x} (|state| > {guard:e})")]
    BlowUp { x: f64, guard: f64 },

    #[error("conserved quantity undefined on the degenerate branch ({0})")]
    DegenerateBranch(String),

    #[error("window does not carry a single surface type: {0}")]
    MixedType(String),

    #[error("ruled chart degenerates at r = {r}, theta = {theta}")]
    DegenerateChart { r: f64, theta: f64 },

    #[error("quadrature integrand is not finite at ({x}, {y})")]
    QuadratureFailure { x: f64, y: f64 },

    #[error("(A, B) = ({a}, {b}) is not a rotation: A^2 + B^2 = {norm2}")]
    BadRotation { a: f64, b: f64, norm2: f64 },

    #[error("Newton refinement diverged from seed ({x}, {y})")]
    NewtonDivergence { x: f64, y: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("vector is not horizontal (T component {0})")]
    NotHorizontal(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn singular(at: impl std::fmt::Display, what: impl Into<String>) -> Self {
        Error::SingularPoint {
            at: at.to_string(),
            what: what.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
