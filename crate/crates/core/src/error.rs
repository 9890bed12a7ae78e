use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {rule}: {msg}")]
    Parse { rule: &'static str, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("decimal angle spec provides fewer digits than the requested precision ({requested} bits)")]
    PrecisionExhausted { requested: u32 },

    #[error("precision cap of {cap} bits reached while certifying {context}")]
    PrecisionCap { cap: u32, context: String },

    #[error("fewer than 2 semigroup elements below M = {m}")]
    InsufficientElements { m: u64 },

    #[error("measure is not T_{q}-invariant: arc ({start}, +{length}] has mass {mass} but preimage mass {preimage_mass}")]
    InvarianceViolation {
        q: u64,
        start: String,
        length: String,
        mass: String,
        preimage_mass: String,
    },

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    #[error("no qualifying N0 found below search limit {limit}")]
    N0NotFound { limit: u64 },

    #[error("construction invariant violated at stage {stage}: {msg}")]
    ConstructionViolation { stage: u32, msg: String },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
