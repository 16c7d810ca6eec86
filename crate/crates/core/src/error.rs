use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The mean spin vanishes, so no transverse plane exists.
    #[error("mean spin length is zero; the transverse frame is undefined")]
    DegenerateFrame,

    /// The two independent minimisation routes disagree beyond tolerance.
    #[error(
        "{route}: eigen minimum {eigen} and search minimum {search} differ by more than {tol}"
    )]
    OracleMismatch {
        route: &'static str,
        eigen: f64,
        search: f64,
        tol: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
