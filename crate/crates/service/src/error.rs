use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use thiserror::Error;
use tracegrow_core::{EngineError, EvalError, TraceError};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown dataset {0}")]
    UnknownDataset(String),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("unknown image {0}")]
    UnknownImage(String),
    #[error("image {image} is not part of session {session}'s current batch")]
    NotInSession { session: String, image: String },
    #[error("dataset {dataset} cannot supply a batch: {reason}")]
    InsufficientImages { dataset: String, reason: &'static str },
    #[error("trace for image {0} has no labeled pixels")]
    EmptyTrace(String),
    #[error("batch is incomplete; images without a refined mask: {missing:?}")]
    IncompleteBatch { missing: Vec<String> },
    #[error("session {0} has no open batch")]
    BatchClosed(String),
    #[error("category {category} is outside the dataset's {available} categories")]
    UnknownCategory { category: u8, available: usize },
    #[error("invalid request: {0}")]
    BadRequest(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Engine(EngineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("image decoding failed: {0}")]
    Image(#[from] image::ImageError),
    #[error("storage error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<EngineError> for ServiceError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::EmptyTrace => ServiceError::EmptyTrace(String::new()),
            other => ServiceError::Engine(other),
        }
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownDataset(_) => "unknown_dataset",
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::UnknownImage(_) => "unknown_image",
            ServiceError::NotInSession { .. } => "not_in_session",
            ServiceError::InsufficientImages { .. } => "insufficient_images",
            ServiceError::EmptyTrace(_) => "empty_trace",
            ServiceError::IncompleteBatch { .. } => "incomplete_batch",
            ServiceError::BatchClosed(_) => "batch_closed",
            ServiceError::UnknownCategory { .. } => "unknown_category",
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::Trace(_) => "invalid_trace",
            ServiceError::Engine(_) => "engine_error",
            ServiceError::Eval(_) => "evaluation_error",
            ServiceError::Image(_) => "image_error",
            ServiceError::Io(_) => "storage_error",
            ServiceError::Internal(_) => "internal_error",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::UnknownDataset(_) | ServiceError::UnknownSession(_) | ServiceError::UnknownImage(_) => {
                StatusCode::NOT_FOUND
            }
            ServiceError::NotInSession { .. } => StatusCode::FORBIDDEN,
            ServiceError::InsufficientImages { .. }
            | ServiceError::IncompleteBatch { .. }
            | ServiceError::BatchClosed(_) => StatusCode::CONFLICT,
            ServiceError::EmptyTrace(_)
            | ServiceError::UnknownCategory { .. }
            | ServiceError::Trace(_)
            | ServiceError::Engine(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Eval(_) | ServiceError::Image(_) | ServiceError::Io(_) | ServiceError::Internal(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = self.status();
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (status, Json(ErrorBody { error: self.code(), message: self.to_string() })).into_response()
    }
}
