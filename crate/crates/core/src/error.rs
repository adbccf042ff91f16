use thiserror::Error;

use crate::oracle::RuleError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid structured document: {0}")]
    Structured(#[from] serde_json::Error),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("empty rights set on edge {from} -> {to}")]
    EmptyRights { from: String, to: String },
    #[error("vertex `{0}` declared with conflicting kinds")]
    ConflictingKind(String),
    #[error("vertex name `{0}` is reserved for created vertices")]
    ReservedName(String),
    #[error("invalid vertex name `{0}`")]
    InvalidName(String),
    #[error("invalid right label `{0}`")]
    InvalidRight(String),
    #[error("vertex `{0}` is not a subject")]
    NotSubject(String),
    #[error("graph contains object `{0}`; subject-only analysis requires every vertex to be a subject")]
    ContainsObject(String),
    #[error("islands do not belong to this graph")]
    ForeignIsland,
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
}
