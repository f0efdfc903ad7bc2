use thiserror::Error;

use super::{ElementRef, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a node needs at least one label")]
    EmptyLabels,
    #[error("labels must be non-empty strings")]
    InvalidLabel,
    #[error("invalid attribute key {key:?}")]
    InvalidAttrKey { key: String },
    #[error("float attributes must be finite")]
    NonFiniteFloat,
    #[error("edge endpoint {id} does not exist")]
    UnknownEndpoint { id: NodeId },
    #[error("{element} does not exist")]
    UnknownElement { element: ElementRef },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("rule references undeclared label `{label}`")]
    UndeclaredLabel { label: String },
    #[error("min > max in attribute rule {context}")]
    InvertedRange { context: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed graph document{}: {message}", position_suffix(*.line, *.column))]
pub struct DocumentError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

fn position_suffix(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at {l}:{c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImportError {
    #[error("malformed {table} table{}: {message}", .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    MalformedTable {
        table: &'static str,
        line: Option<u64>,
        message: String,
    },
    #[error("column `{header}` does not name a characteristic label")]
    UnknownCharacteristicLabel { header: String },
    #[error("weight {value} for {practice} -> {column} is outside [0, 5]")]
    WeightOutOfRange {
        practice: String,
        column: String,
        value: f64,
    },
}
