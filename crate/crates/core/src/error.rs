use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("rank {rank} out of range 1..={max} for {what}")]
    RankOutOfRange {
        what: &'static str,
        rank: usize,
        max: usize,
    },

    #[error("need at least {k} rows to form {k} clusters, got {n}")]
    TooFewPoints { n: usize, k: usize },

    #[error("cluster {cluster} has no weight left")]
    DegenerateCluster { cluster: usize },

    #[error("cluster {cluster} is empty")]
    EmptyCluster { cluster: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
