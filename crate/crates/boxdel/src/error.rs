use thiserror::Error;

/// Failures surfaced through `Result`. Precondition violations that
/// indicate caller bugs (dimension mismatches, unknown labels) panic
/// instead; the operations that check them say so in their docs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid point set: {0}")]
    InvalidPointSet(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parameter out of range: {0}")]
    ParamsOutOfRange(String),
    #[error("recursion aborted at stage {stage} in dimension {dim}")]
    RecursionAborted { stage: usize, dim: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("scaling report needs at least 3 distinct n, got {0}")]
    InsufficientGrid(usize),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
