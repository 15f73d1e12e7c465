use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("interpretation needs at least one candidate object")]
    EmptyCandidates,

    #[error("index out of range: {what} {index} >= {bound}")]
    OutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("matrix is not frozen: row {row} is not binary")]
    NotFrozen { row: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "exact occupancy distribution limited to N, H <= {bound} (got N={n_objects}, H={n_words}); \
         use the Poisson limit instead"
    )]
    ExactBound {
        n_objects: usize,
        n_words: usize,
        bound: usize,
    },

    #[error("fit error: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
