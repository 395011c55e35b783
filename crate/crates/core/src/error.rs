//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("collection of subspaces must be nonempty")]
    EmptyCollection,

    #[error("relaxation parameter {0} outside [0, 2]")]
    LambdaOutsideClosedRange(f64),

    #[error("relaxation parameter {0} outside the open interval (0, 2)")]
    LambdaOutsideOpenRange(f64),

    #[error("schedule index {index} out of range for a collection of {len} subspaces")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("explicit schedule supplies {supplied} indices but step {step} was requested")]
    ScheduleExhausted { supplied: usize, step: usize },

    #[error("varying-lambda rule supplies {supplied} values but step {step} was requested")]
    LambdaRuleExhausted { supplied: usize, step: usize },

    #[error("operation requires a fixed relaxation parameter but the schedule varies it per step")]
    VaryingLambdaUnsupported,

    #[error(
        "subcollection enumeration over {ell} subspaces exceeds the guard of {guard}; \
         raise the guard explicitly to proceed"
    )]
    GuardExceeded { ell: usize, guard: usize },

    #[error("block {block} is internally inconsistent: least-squares residual {residual:.3e}")]
    InconsistentBlock { block: usize, residual: f64 },

    #[error("blocks do not partition the row set: {0}")]
    InvalidBlocks(String),

    #[error("the map has no fixed point (least-squares residual {residual:.3e})")]
    NoFixedPoint { residual: f64 },

    #[error("kappa_star must exceed 1, got {0}")]
    KappaNotAboveOne(f64),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
