use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use criteria_core::generation::GenerationError;
use criteria_core::history::HistoryError;
use criteria_core::session::{SessionError, SessionId};
use criteria_core::store::StoreError;
use serde_json::{json, Value};

/// Everything a handler can fail with. Session-core and generation errors
/// keep their wire form (a `code` plus fields) in the response body.
#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("no session {0}")]
    UnknownSession(SessionId),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Generation(GenerationError),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Store(StoreError),
    #[error("{0}")]
    MalformedBody(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ApiError::Session(e) => match e.code() {
                "unknown-option" | "unknown-criterion" | "unknown-definition" => StatusCode::NOT_FOUND,
                "empty-decision-text" | "empty-text" | "invalid-config" => StatusCode::UNPROCESSABLE_ENTITY,
                _ => StatusCode::CONFLICT,
            },
            ApiError::Generation(GenerationError::UnknownCriterion { .. }) => StatusCode::NOT_FOUND,
            ApiError::Generation(_) => StatusCode::BAD_GATEWAY,
            ApiError::History(HistoryError::BadBranchPoint { .. }) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::History(_) => StatusCode::INTERNAL_SERVER_ERROR,
            ApiError::Store(StoreError::NotFound(_)) => StatusCode::NOT_FOUND,
            ApiError::Store(_) => StatusCode::INTERNAL_SERVER_ERROR,
            ApiError::MalformedBody(_) | ApiError::BadRequest(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn body(&self) -> Value {
        let message = self.to_string();
        let mut body = match self {
            ApiError::Session(e) => serde_json::to_value(e).expect("serializable"),
            ApiError::Generation(e) => serde_json::to_value(e).expect("serializable"),
            ApiError::History(e) => serde_json::to_value(e).expect("serializable"),
            ApiError::UnknownSession(id) => json!({"code": "unknown-session", "session_id": id}),
            ApiError::Store(e) => json!({"code": e.code()}),
            ApiError::MalformedBody(_) => json!({"code": "malformed-body"}),
            ApiError::BadRequest(_) => json!({"code": "bad-request"}),
            ApiError::Internal(_) => json!({"code": "internal"}),
        };
        body["message"] = message.into();
        body
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (self.status(), Json(self.body())).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(rejection: JsonRejection) -> Self {
        ApiError::MalformedBody(rejection.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(rejection: QueryRejection) -> Self {
        ApiError::MalformedBody(rejection.body_text())
    }
}
