use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No comparison between the two features was ever recorded. Kept
    /// separate from a legitimate empirical probability of zero.
    #[error("no comparisons recorded between `{0}` and `{1}`")]
    NoData(String, String),

    #[error("recourses are not comparable: {0}")]
    NotComparable(String),

    #[error(
        "comparison graph is not strongly connected; strengths are not identifiable \
         without a positive pseudo-count"
    )]
    NonIdentifiable,

    #[error("catalog mismatch: {0}")]
    CatalogMismatch(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
