use thiserror::Error;

/// Errors produced by the synthesis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary (max deviation {deviation:.3e} > {tol:.1e})")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("unknown gate name `{0}`")]
    UnknownGate(String),

    #[error("gate `{name}`: {reason}")]
    GateParameter { name: String, reason: String },

    #[error("{what} out of range: {value} (allowed {allowed})")]
    OutOfRange { what: &'static str, value: i64, allowed: String },

    #[error("invalid wires: {0}")]
    Wires(String),

    #[error("wire-count mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("circuit contains {0} gates; only one-qubit and CNOT gates are allowed here")]
    IntermediateGates(&'static str),

    #[error("dense evaluation limited to {cap} wires, circuit has {n}")]
    DenseCap { n: usize, cap: usize },

    #[error("circuit schema: {0}")]
    Schema(String),

    #[error("synthesis failed verification: {0}")]
    Verification(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
