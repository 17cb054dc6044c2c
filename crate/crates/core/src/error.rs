use thiserror::Error;

use crate::syntax::{Atom, Path};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("proof syntax error on line {line}: {message}")]
    ProofSyntax { line: usize, message: String },

    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),

    #[error("index components must be positive")]
    ZeroIndex,

    #[error("path {0} is out of range")]
    PathOutOfRange(Path),

    #[error("path {0} addresses a literal, not a connective")]
    NotAConnective(Path),

    #[error("paths {0} and {1} are nested")]
    NestedPair(Path, Path),

    #[error("rank mismatch: cannot relabel rank {from} to rank {to}")]
    RankMismatch { from: u32, to: u32 },

    #[error("cluster {0} already occurs with a different type or rank")]
    TypeConflict(u32),

    #[error("cirquent is not classical")]
    NotClassical,

    #[error("ill-formed cirquent: {0}")]
    IllFormed(String),

    #[error("interpretation assigns no value to atom `{0}`")]
    MissingAtom(Atom),

    #[error("metaselection vector has no entry for rank {0}")]
    MissingRank(u32),

    #[error("enumeration cap exceeded: {what} = {found}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        found: usize,
        cap: usize,
    },

    #[error("malformed interpretation: {0}")]
    BadInterpretation(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("condition violated: {0}")]
    ConditionViolation(String),

    #[error("fresh cluster ID {0} already occurs")]
    FreshIdCollision(u32),

    #[error("ill-formed result: {0}")]
    IllFormedResult(String),

    #[error("conclusion mismatch: expected {expected}, rule produced {produced}")]
    ConclusionMismatch { expected: String, produced: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid pin: {0}")]
    InvalidPin(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
