use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("unknown variable `{0}`")]
    UnknownVar(String),

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("arity mismatch for `{rel}`: expected {expected}, got {got}")]
    ArityMismatch {
        rel: String,
        expected: usize,
        got: usize,
    },

    #[error("free variable `{0}` has no assigned value")]
    UnassignedVar(String),

    #[error("assignment is not a member of the team")]
    NotInTeam,

    #[error("dependence model has an empty team")]
    EmptyTeam,

    #[error("closure size {size} exceeds cap {cap}")]
    ClosureCap { size: usize, cap: usize },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("quantifier is not guarded")]
    Unguarded,

    #[error("variable map does not match the free variables: {0}")]
    RhoMismatch(String),

    #[error("model violates the setup theory: {0}")]
    SetupViolated(String),

    #[error("model interprets no admissible assignment tuples")]
    NoAdmissibleTuples,

    #[error("invalid input: {0}")]
    Validation(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ClosureCap { .. } | Error::ResourceCap(_) => 3,
            _ => 2,
        }
    }
}
