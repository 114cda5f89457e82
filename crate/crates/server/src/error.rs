use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use scimine_core::pipeline::PipelineError;
use serde::Serialize;

/// Error body: `{code, message}`, plus the document's current version on
/// a version conflict.
#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub current_version: Option<u64>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), current_version: None }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn unauthorized() -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing or invalid bearer token")
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let message = e.to_string();
        let (status, code) = match &e {
            PipelineError::StaleVersion { current, .. } => {
                return ApiError { current_version: Some(*current), ..Self::new(StatusCode::CONFLICT, "stale_version", message) }
            }
            PipelineError::InvalidCorrection { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_correction"),
            PipelineError::AlreadyGold(_) => (StatusCode::CONFLICT, "already_gold"),
            PipelineError::TaskDone(_) => (StatusCode::CONFLICT, "task_done"),
            PipelineError::TaskClaimed { .. } => (StatusCode::CONFLICT, "task_claimed"),
            PipelineError::NoNewGold => (StatusCode::CONFLICT, "no_new_gold"),
            PipelineError::MissingDocument(_) => (StatusCode::NOT_FOUND, "not_found"),
            PipelineError::WorkspaceLocked(_) => (StatusCode::LOCKED, "workspace_locked"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        if status.is_server_error() {
            log::error!("{message}");
        }
        Self::new(status, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}
