use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient points: requested {requested}, available {available}")]
    InsufficientPoints { requested: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("duplicate points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid weight function: {0}")]
    InvalidWeight(String),

    #[error("functional returned an invalid value {value} at point {index}")]
    InvalidXiValue { index: usize, value: f64 },

    #[error("supercritical clump: {size} mutually intersecting balls exceed the enumeration budget")]
    SupercriticalClump { size: usize },

    #[error("no stabilized samples out of {replicates} replicates")]
    Unstabilized { replicates: usize },

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            location: location.into(),
            message: message.into(),
        }
    }
}
