use std::collections::BTreeMap;
use std::path::Path;

use http::{header, HeaderMap, StatusCode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ApiError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Admin,
}

/// Bearer token to role.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenTable(pub BTreeMap<String, Role>);

#[derive(Debug, Error)]
pub enum TokenFileError {
    #[error("cannot read token file {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed token file {path}: {message}")]
    Format { path: String, message: String },
}

impl TokenTable {
    pub fn with(mut self, token: &str, role: Role) -> Self {
        self.0.insert(token.to_string(), role);
        self
    }

    /// Reads a JSON object mapping tokens to `"user"` or `"admin"`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TokenFileError> {
        let path = path.as_ref();
        let shown = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|e| TokenFileError::Io {
            path: shown.clone(),
            message: e.to_string(),
        })?;
        serde_json::from_slice(&bytes).map_err(|e| TokenFileError::Format {
            path: shown,
            message: e.to_string(),
        })
    }

    /// Role for the request's bearer token; `None` if absent or unknown.
    pub fn role(&self, headers: &HeaderMap) -> Option<Role> {
        let value = headers.get(header::AUTHORIZATION)?.to_str().ok()?;
        let (scheme, token) = value.split_once(' ')?;
        if !scheme.eq_ignore_ascii_case("bearer") {
            return None;
        }
        self.0.get(token.trim()).copied()
    }

    pub(crate) fn require_admin(&self, headers: &HeaderMap) -> Result<(), ApiError> {
        match self.role(headers) {
            Some(Role::Admin) => Ok(()),
            Some(Role::User) => Err(ApiError::new(
                StatusCode::FORBIDDEN,
                "Forbidden",
                "administrator role required",
            )),
            None => Err(ApiError::new(
                StatusCode::UNAUTHORIZED,
                "Unauthorized",
                "missing or unknown bearer token",
            )),
        }
    }
}
