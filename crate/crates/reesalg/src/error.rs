use thiserror::Error;

/// Failures surfaced by the library.
///
/// Variants split into three groups, matching the process exit codes used by
/// the command-line front end: malformed input (code 2), mathematical
/// failure (code 1), and exhausted resource budgets (code 3).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("undeclared variable `{name}` at line {line}, column {col}")]
    UndeclaredVariable { name: String, line: usize, col: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("derivation is not well-defined: image of relation `{relation}` reduces to `{image}`, not into the defining ideal")]
    NotWellDefined { relation: String, image: String },

    #[error("nilpotency of `{element}` not established within bound {bound}")]
    NilpotencyBound { element: String, bound: u32 },

    #[error("element `{element}` does not lie in filtration level {level}")]
    NotInFiltration { element: String, level: u32 },

    #[error("generator search did not stabilize within {max_iter} iterations")]
    NonTermination {
        max_iter: u32,
        /// Rendered partial trace: one line per completed iteration.
        partial_trace: Vec<String>,
    },

    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),

    #[error("S-pair budget exhausted: {processed} pairs processed (cap {cap})")]
    Budget { processed: usize, cap: usize },
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::UndeclaredVariable { .. } | Error::InvalidInput(_) => 2,
            Error::Budget { .. } => 3,
            _ => 1,
        }
    }
}
