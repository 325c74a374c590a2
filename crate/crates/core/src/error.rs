use thiserror::Error;

/// Errors raised by the library.
///
/// Most of these are configuration or input problems. Numerical failures of a
/// single candidate (singular frame, bearing failure) are reported through the
/// evaluation result and end up as a penalized cost instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("design variable spec: {0}")]
    Spec(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("configuration error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular stiffness matrix, free modes at {free_dofs:?}")]
    Singular { free_dofs: Vec<String> },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("bearing failure: pressure {pressure:.3} kPa reaches capacity {capacity:.3} kPa")]
    BearingFailure { pressure: f64, capacity: f64 },

    #[error("input error: {0}")]
    Input(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
