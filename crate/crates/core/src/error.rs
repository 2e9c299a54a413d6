use thiserror::Error;

use crate::quadrature::Estimate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("degenerate sample: every observation equals k, so sum ln(x/k) = 0")]
    DegenerateSample,

    #[error("sample of size {n} is too small; at least {required} observations are needed")]
    InsufficientSample { n: usize, required: usize },

    #[error("moment of order {order} does not exist for n = {n}")]
    MomentDoesNotExist { n: usize, order: u32 },

    #[error("quadrature did not reach tolerance (best estimate {} +/- {})", .best.value, .best.error)]
    Accuracy { best: Estimate },

    #[error("{degenerate} of {reps} replications were degenerate")]
    TooManyDegenerate { degenerate: usize, reps: usize },

    #[error("unsupported combination: {0}")]
    Unsupported(String),
}
