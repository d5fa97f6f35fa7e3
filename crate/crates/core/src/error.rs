use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coincident endpoints")]
    CoincidentEndpoints,

    #[error("no wall crossing")]
    NoWallCrossing,

    #[error("invalid diffraction parameter")]
    InvalidDiffractionParameter,

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("MS outside room")]
    OutsideRoom,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },

    #[error("{0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by a malformed or inconsistent configuration,
    /// as opposed to a numeric domain failure during evaluation.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::UnknownKey(_) | Error::InvalidValue { .. } | Error::Config(_)
        )
    }
}
