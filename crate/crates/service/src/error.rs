use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use trustrep::{DomainError, EngineError, StoreError, TextError};

/// Body of every non-success response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retry_after_seconds: Option<i64>,
}

#[derive(Debug)]
pub struct ErrorResponse {
    pub status: StatusCode,
    pub body: ApiError,
}

impl ErrorResponse {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ApiError {
                code: code.to_string(),
                message: message.into(),
                retry_after_seconds: None,
            },
        }
    }

    pub fn retry_after(mut self, seconds: i64) -> Self {
        self.body.retry_after_seconds = Some(seconds);
        self
    }
}

impl IntoResponse for ErrorResponse {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

fn domain(err: &DomainError) -> (StatusCode, &'static str) {
    match err {
        DomainError::AppreciationOutOfRange(_) => (StatusCode::BAD_REQUEST, "invalid_appreciation"),
        DomainError::EmptyText => (StatusCode::BAD_REQUEST, "empty_text"),
        DomainError::UnknownCategory(_) => (StatusCode::BAD_REQUEST, "invalid_category"),
        _ => (StatusCode::BAD_REQUEST, "invalid_input"),
    }
}

impl From<EngineError> for ErrorResponse {
    fn from(err: EngineError) -> Self {
        let message = err.to_string();
        let (status, code) = match &err {
            EngineError::Blacklisted {
                remaining_seconds, ..
            } => {
                return ErrorResponse::new(StatusCode::FORBIDDEN, "blacklisted", message)
                    .retry_after(*remaining_seconds)
            }
            EngineError::DuplicateVote { .. } => (StatusCode::CONFLICT, "duplicate_vote"),
            EngineError::NotInSelection { .. } => (StatusCode::CONFLICT, "not_in_selection"),
            EngineError::SessionOwner { .. } => (StatusCode::FORBIDDEN, "session_owner"),
            EngineError::SessionState { .. } => (StatusCode::CONFLICT, "invalid_state"),
            EngineError::IncompleteVotes { .. } => (StatusCode::CONFLICT, "incomplete_votes"),
            EngineError::Invalid(e) => domain(e),
            EngineError::Text(e) => match e {
                TextError::EmptyText => (StatusCode::BAD_REQUEST, "empty_text"),
                TextError::AppreciationOutOfRange(_) => {
                    (StatusCode::BAD_REQUEST, "invalid_appreciation")
                }
                _ => (StatusCode::INTERNAL_SERVER_ERROR, "lexicon"),
            },
            EngineError::Store(e) => match e {
                StoreError::Invalid(d) => domain(d),
                StoreError::DuplicateUser(_) => (StatusCode::CONFLICT, "duplicate_user"),
                StoreError::DuplicateFeedback(_) => (StatusCode::CONFLICT, "duplicate_feedback"),
                StoreError::UnknownUser(_) => (StatusCode::NOT_FOUND, "unknown_user"),
                StoreError::UnknownFeedback(_) => (StatusCode::NOT_FOUND, "unknown_feedback"),
                StoreError::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
                StoreError::InvalidSelectionSize(_) => (StatusCode::BAD_REQUEST, "invalid_k"),
                StoreError::InvalidTtl(_) => (StatusCode::BAD_REQUEST, "invalid_input"),
                StoreError::CorruptJournal { .. } | StoreError::Io(_) => {
                    (StatusCode::INTERNAL_SERVER_ERROR, "storage")
                }
            },
        };
        ErrorResponse::new(status, code, message)
    }
}

impl From<StoreError> for ErrorResponse {
    fn from(err: StoreError) -> Self {
        EngineError::from(err).into()
    }
}
