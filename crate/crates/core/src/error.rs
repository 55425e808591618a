use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unsupported configuration: {0}")]
    Capability(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("geodesic is not unique: principal angle {angle} is within {tol} of pi/2")]
    DegenerateGeodesic { angle: f64, tol: f64 },

    #[error("rank deficiency: {0}")]
    Rank(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("Monte Carlo budget {got} is below the minimum {min}")]
    Budget { got: usize, min: usize },

    #[error("recovery condition violated: {0}")]
    Condition(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
