use std::collections::HashMap;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde_json::json;
use tracegrow_core::StrokeDocument;

use crate::app::{AppState, CreateSession};
use crate::error::ServiceError;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/datasets", get(list_datasets))
        .route("/datasets/{id}/export", get(export))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/images/{image}/trace", put(put_trace))
        .route("/sessions/{id}/images/{image}/refine", post(refine))
        .route("/sessions/{id}/submit", post(submit))
        .route("/images/{id}", get(image))
        .with_state(state)
}

fn parse<T: serde::de::DeserializeOwned>(body: &str) -> Result<T, ServiceError> {
    serde_json::from_str(body).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

async fn health(State(app): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "datasets": app.store().len() }))
}

async fn list_datasets(State(app): State<AppState>) -> impl IntoResponse {
    Json(app.list_datasets())
}

async fn create_session(State(app): State<AppState>, body: String) -> Result<Response, ServiceError> {
    let req: CreateSession = parse(&body)?;
    let view = app.create_session(req).await?;
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(app.session_view(&id).await?).into_response())
}

async fn put_trace(
    State(app): State<AppState>,
    Path((id, image)): Path<(String, String)>,
    body: String,
) -> Result<Response, ServiceError> {
    let doc = StrokeDocument::from_json(&body)?;
    Ok(Json(app.put_trace(&id, &image, doc).await?).into_response())
}

async fn refine(State(app): State<AppState>, Path((id, image)): Path<(String, String)>) -> Result<Response, ServiceError> {
    Ok(Json(app.refine_image(&id, &image).await?).into_response())
}

async fn submit(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(app.submit(&id).await?).into_response())
}

async fn image(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Response, ServiceError> {
    let (ctype, bytes) = app.image_file(&id, q.get("dataset").map(String::as_str))?;
    Ok(([(header::CONTENT_TYPE, ctype)], bytes).into_response())
}

async fn export(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let archive = app.export(&id).await?;
    let disposition = format!("attachment; filename=\"{id}-submissions.tar\"");
    Ok(([(header::CONTENT_TYPE, "application/x-tar".to_string()), (header::CONTENT_DISPOSITION, disposition)], archive)
        .into_response())
}
