use thiserror::Error;

use crate::generator::BucketId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("automaton needs at least one state")]
    NoStates,
    #[error("automaton needs at least one symbol")]
    NoSymbols,
    #[error(
        "transition ({src}, {sym}, {dst}) out of range for {num_states} states and {num_symbols} symbols"
    )]
    TransitionOutOfRange {
        src: usize,
        sym: usize,
        dst: usize,
        num_states: usize,
        num_symbols: usize,
    },
    #[error("accepting state {state} out of range for {num_states} states")]
    AcceptingOutOfRange { state: usize, num_states: usize },
    #[error("symbol {sym} out of range for {num_symbols} symbols")]
    SymbolOutOfRange { sym: usize, num_symbols: usize },
    #[error("lasso cycle must be non-empty")]
    EmptyCycle,
    #[error("state permutation must be a bijection fixing state 0")]
    BadPermutation,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute-force oracle refuses {num_states} states (limit {limit})")]
    TooManyStates { num_states: usize, limit: usize },
    #[error("target symbol {target} out of range for {num_symbols} symbols")]
    TargetOutOfRange { target: usize, num_symbols: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("bucket {bucket} starved: {filled}/{quota} after {draws} draws")]
    Starved {
        bucket: BucketId,
        filled: usize,
        quota: usize,
        draws: u64,
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("malformed header: {0}")]
    Header(String),
    #[error("malformed record {record} (line {line}): {reason}")]
    Record {
        record: usize,
        line: usize,
        reason: String,
    },
    #[error("header quota mismatch for bucket {bucket}: header says {expected}, file has {found}")]
    QuotaMismatch {
        bucket: BucketId,
        expected: usize,
        found: usize,
    },
    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GnnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("invalid training configuration: {0}")]
    Config(String),
}
