use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angle {0} rad is outside [-pi/2, pi/2]")]
    AngleOutOfRange(f64),

    #[error("invalid array configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("subarray index {index} out of range for {count} subarrays")]
    SubarrayIndex { index: usize, count: usize },

    #[error("{what}: expected length {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("waveform bank needs 1 <= K <= L, got K = {k}, L = {l}")]
    InvalidBank { k: usize, l: usize },

    #[error("transmit weight vector {index} has norm {norm}, expected unit norm")]
    NotUnitNorm { index: usize, norm: f64 },

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("beamformer has zero response in the look direction")]
    ZeroResponse,

    #[error("no snapshots supplied")]
    NoSnapshots,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
