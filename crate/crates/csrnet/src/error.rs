use std::path::PathBuf;

/// Errors produced anywhere in the engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        context: &'static str,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("invalid model config: {0}")]
    Config(String),

    #[error("training diverged at iteration {iter}: {reason}")]
    Divergence { iter: u64, reason: String },

    #[error("not a checkpoint file (bad magic)")]
    CheckpointMagic,

    #[error("unsupported checkpoint version {0}")]
    CheckpointVersion(u32),

    #[error("truncated checkpoint: {0}")]
    CheckpointTruncated(String),

    #[error("checkpoint config mismatch: {0}")]
    CheckpointConfigMismatch(String),

    #[error("checkpoint parameter mismatch: {0}")]
    CheckpointParam(String),

    #[error("missing counterpart for {0}")]
    MissingCounterpart(PathBuf),

    #[error("pair dimension mismatch for {name}: input {input:?}, target {target:?}")]
    PairDimensionMismatch {
        name: String,
        input: (usize, usize),
        target: (usize, usize),
    },

    #[error("unsupported image format for {path}: {detail}")]
    UnsupportedImage { path: PathBuf, detail: String },

    #[error("cannot decode {path}: {detail}")]
    UndecodableImage { path: PathBuf, detail: String },

    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
