use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dyadic index must be >= 1, got 0")]
    ZeroDyadicIndex,

    #[error("point {0} lies outside [0, 1]")]
    OutOfUnitInterval(f64),

    #[error("h_n + 1 = {0} is not a power of two")]
    NotPowerOfTwo(u64),

    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol:e} within {max_intervals} subintervals")]
    Quadrature {
        a: f64,
        b: f64,
        tol: f64,
        max_intervals: usize,
    },

    #[error("invalid frontier: {0}")]
    InvalidFrontier(String),

    #[error("cannot parse frontier label {0:?}")]
    UnknownFrontier(String),

    #[error("rejection sampler would accept fewer than one draw in {ratio:.3e} (M / mean f)")]
    PathologicalRejection { ratio: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample was drawn with n = {sample} but the partition uses n = {partition}")]
    PartitionMismatch { sample: u64, partition: u64 },

    #[error("estimator requires d_n = 1, got d_n = {0}")]
    RequiresUnitBlock(u64),

    #[error("estimator requires d_n > 1")]
    RequiresCoarseBlocks,

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
