use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        actual: Vec<usize>,
    },
    #[error("mode {mode} out of range for a tensor of order {order}")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("negative entry {value} at index {index}")]
    Negative { index: usize, value: f64 },
    #[error("rank {rank} exceeds the smallest tensor extent {extent}")]
    RankTooLarge { rank: usize, extent: usize },
    #[error("coordinate {value} of point {point} lies outside [0, 1]")]
    OutOfUnitCube { point: usize, value: f64 },
    #[error("not a probability tensor: {0}")]
    NotProbability(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
