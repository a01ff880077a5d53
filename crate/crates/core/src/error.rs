use thiserror::Error;

use crate::mesh::TriRef;
use crate::rules::RuleViolation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("empty action sequence")]
    EmptySequence,

    #[error("action pattern {0} is not one of the nine group configurations")]
    UnsupportedPattern(String),

    #[error("rule violation: {}", join_violations(.0))]
    Rules(Vec<RuleViolation>),

    #[error("invalid fold {fold}: {reason}")]
    InvalidFold { fold: String, reason: String },

    #[error("invalid punch at {location}: {reason}")]
    InvalidPunch { location: TriRef, reason: String },

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[RuleViolation]) -> String {
    v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("; ")
}
