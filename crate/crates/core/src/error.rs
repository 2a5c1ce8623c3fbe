use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure at step {step}: {message}")]
    Numeric { step: usize, message: String },

    #[error("marked point {point} swallowed at t = {time}")]
    Swallowed { point: f64, time: f64 },

    #[error("flow line at angle {angle}: {source}")]
    AtAngle {
        angle: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for errors that stem from numerics rather than bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Numeric { .. } | Error::Swallowed { .. } => true,
            Error::AtAngle { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
