use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("enclosure straddles an integer (radius ~2^{radius_log2}); refine upstream precision")]
    AmbiguousBoundary { radius_log2: i64 },

    #[error("radius ~2^{radius_log2} exceeds the 2^-{target_bits} target")]
    InsufficientPrecision { radius_log2: i64, target_bits: u32 },

    #[error("precision exhausted: {bits} working bits exceed the cap of {cap}")]
    PrecisionExhausted { bits: u64, cap: u64 },

    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),

    #[error("difference with gap {h} of a length-{len} sequence is empty")]
    EmptyResult { h: usize, len: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("table size {requested} exceeds the capacity {max}")]
    CapacityExceeded { requested: u64, max: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),

    #[error("malformed table file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
