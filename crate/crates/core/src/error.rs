use crate::model::PuzzleKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid size {size_n} for {kind}: {reason}")]
    InvalidSize {
        kind: PuzzleKind,
        size_n: u32,
        reason: String,
    },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("instance is unsolvable")]
    Unsolvable,
    #[error("outside solver range: {0}")]
    RangeExceeded(String),
    #[error("prompt variant `{variant}` is not available for {kind}")]
    UnsupportedVariant { kind: PuzzleKind, variant: String },
    #[error("cannot compute a position in empty text")]
    EmptyText,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("tokenizer: {0}")]
    Tokenizer(String),
    #[error("duplicate record key (run `{run_id}`, instance `{instance_id}`, sample {sample_idx})")]
    DuplicateKey {
        run_id: String,
        instance_id: String,
        sample_idx: u32,
    },
    #[error("manifest run id `{manifest}` does not match log run id `{log}`")]
    RunIdMismatch { manifest: String, log: String },
    #[error("corrupt log {path} at line {line}: {reason}")]
    CorruptLog {
        path: String,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
