use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// 1-based line and column (in characters) within the query text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub fn new(line: usize, column: usize) -> Self {
        Self { line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

fn at(position: &Option<Position>) -> String {
    position.map(|p| format!(" at {p}")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("{message} at {position}")]
    Lex { position: Position, message: String },
    #[error("expected {expected} at {position} (found {found})")]
    Parse {
        position: Position,
        expected: String,
        found: String,
    },
    #[error("undeclared variable `{name}`{}", at(.position))]
    UndeclaredVariable { name: String, position: Option<Position> },
    #[error("variable `{name}` is used for both a node and an edge{}", at(.position))]
    VariableKindConflict { name: String, position: Option<Position> },
    #[error("comparison needs at least one property reference{}", at(.position))]
    LiteralComparison { position: Option<Position> },
}

impl QueryError {
    pub fn position(&self) -> Option<Position> {
        match self {
            QueryError::Lex { position, .. } | QueryError::Parse { position, .. } => Some(*position),
            QueryError::UndeclaredVariable { position, .. }
            | QueryError::VariableKindConflict { position, .. }
            | QueryError::LiteralComparison { position } => *position,
        }
    }

    /// Stable machine-readable name of the error variant.
    pub fn code(&self) -> &'static str {
        match self {
            QueryError::Lex { .. } => "LexError",
            QueryError::Parse { .. } => "ParseError",
            QueryError::UndeclaredVariable { .. } => "UndeclaredVariable",
            QueryError::VariableKindConflict { .. } => "VariableKindConflict",
            QueryError::LiteralComparison { .. } => "LiteralComparison",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoilerplateError {
    #[error("unknown boilerplate `{name}`")]
    UnknownTemplate { name: String },
    #[error("missing parameter `{name}`")]
    MissingParam { name: String },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },
}
