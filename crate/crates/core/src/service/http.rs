//! axum binding of the engine. Request and response bodies are the envelope types.

use super::engine::{Engine, ServiceError};
use super::envelope::{ErrorEnvelope, RequestParams, ENGINE_VERSION, SCHEMA_VERSION};
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Duration;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatRequest {
    #[serde(default)]
    pub session_id: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfirmRequest {
    pub session_id: String,
    /// Edited parameters; omit to accept the extracted ones.
    #[serde(default)]
    pub params: Option<RequestParams>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComputeRequest {
    pub session_id: String,
    pub compute_token: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeedbackRequest {
    pub session_id: String,
    pub stars: i64,
    #[serde(default)]
    pub comment: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SessionQuery {
    pub session_id: String,
}

pub struct ApiError(StatusCode, ErrorEnvelope);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        ApiError(status, e.to_envelope())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError(
            StatusCode::BAD_REQUEST,
            ErrorEnvelope {
                schema_version: SCHEMA_VERSION.into(),
                kind: "error".into(),
                error: "bad_request".into(),
                message: r.body_text(),
                fields: Vec::new(),
                code: None,
            },
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

type Api<T> = Result<Json<T>, ApiError>;

async fn chat(State(e): State<Arc<Engine>>, body: Result<Json<ChatRequest>, JsonRejection>) -> Api<impl Serialize> {
    let Json(req) = body?;
    Ok(Json(e.chat(req.session_id.as_deref(), &req.text)?))
}

async fn confirm(State(e): State<Arc<Engine>>, body: Result<Json<ConfirmRequest>, JsonRejection>) -> Api<impl Serialize> {
    let Json(req) = body?;
    Ok(Json(e.confirm(&req.session_id, req.params)?))
}

async fn compute(State(e): State<Arc<Engine>>, body: Result<Json<ComputeRequest>, JsonRejection>) -> Api<impl Serialize> {
    let Json(req) = body?;
    let env = tokio::task::spawn_blocking(move || e.compute(&req.session_id, &req.compute_token))
        .await
        .map_err(|err| ServiceError::Internal(err.to_string()))??;
    Ok(Json(env))
}

async fn feedback(State(e): State<Arc<Engine>>, body: Result<Json<FeedbackRequest>, JsonRejection>) -> Api<impl Serialize> {
    let Json(req) = body?;
    Ok(Json(e.feedback(&req.session_id, req.stars, req.comment)?))
}

async fn delete_by_path(State(e): State<Arc<Engine>>, Path(id): Path<String>) -> Api<impl Serialize> {
    Ok(Json(e.delete_session(&id)?))
}

async fn delete_by_query(State(e): State<Arc<Engine>>, Query(q): Query<SessionQuery>) -> Api<impl Serialize> {
    Ok(Json(e.delete_session(&q.session_id)?))
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({
        "status": "ok",
        "schema_version": SCHEMA_VERSION,
        "engine_version": ENGINE_VERSION,
    }))
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/chat", post(chat))
        .route("/confirm", post(confirm))
        .route("/compute", post(compute))
        .route("/feedback", post(feedback))
        .route("/session", delete(delete_by_query))
        .route("/session/{id}", delete(delete_by_path))
        .route("/health", get(health))
        .with_state(engine)
}

/// Expires idle sessions on a fixed interval until the runtime shuts down.
pub fn spawn_sweeper(engine: Arc<Engine>, every: Duration) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(every);
        loop {
            tick.tick().await;
            let e = engine.clone();
            let _ = tokio::task::spawn_blocking(move || e.sweep_expired()).await;
        }
    })
}

pub async fn serve(engine: Arc<Engine>, addr: std::net::SocketAddr) -> std::io::Result<()> {
    spawn_sweeper(engine.clone(), Duration::from_secs(60));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(engine)).await
}
