use axum::response::{IntoResponse, Response};
use http::StatusCode;
use iaselect_core::graph::{GraphError, StoreError};
use iaselect_core::query::{Position, QueryError};
use iaselect_core::recommender::ReportError;
use serde::Serialize;

use crate::json_response;

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<Position>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            code: code.to_string(),
            message: message.into(),
            position: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "InvalidRequest", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NotFound", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status, &self)
    }
}

impl From<QueryError> for ApiError {
    fn from(err: QueryError) -> Self {
        Self {
            position: err.position(),
            ..Self::new(StatusCode::BAD_REQUEST, err.code(), err.to_string())
        }
    }
}

impl From<ReportError> for ApiError {
    fn from(err: ReportError) -> Self {
        let status = match err {
            ReportError::InvalidCriteria(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ReportError::UnknownContext { .. } => StatusCode::BAD_REQUEST,
        };
        Self::new(status, err.code(), err.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(err: StoreError) -> Self {
        let message = err.to_string();
        match err {
            StoreError::Graph(GraphError::UnknownElement { .. } | GraphError::UnknownEndpoint { .. }) => {
                Self::new(StatusCode::NOT_FOUND, "UnknownElement", message)
            }
            StoreError::Graph(_) => Self::bad_request(message),
            StoreError::SchemaViolation(_) => Self::new(StatusCode::CONFLICT, "SchemaViolation", message),
            StoreError::Document(_) | StoreError::Io { .. } => {
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", message)
            }
        }
    }
}
