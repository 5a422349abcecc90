use thiserror::Error;

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// A failure inside one sweep point of an experiment.
    #[error("{experiment} at {point}: {source}")]
    AtPoint {
        experiment: String,
        point: String,
        #[source]
        source: sdm_core::Error,
    },
    #[error(transparent)]
    Core(#[from] sdm_core::Error),
}
