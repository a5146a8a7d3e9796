use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("identifier: {0}")]
    Id(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] mfcollab::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
