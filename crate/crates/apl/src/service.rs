//! JSON-over-HTTP front for the compiler, used by the browser playground.
//!
//! ```text
//! POST /v1/compile  {source, backend?, origin?}                      -> CompileResponse
//! POST /v1/run      {source, backend?, origin?, attachments?, stdin?} -> {compile, run?}
//! GET  /v1/health                                                     -> {ok: true}
//! ```

use std::net::SocketAddr;
use std::sync::Arc;

use apl_core::SourceFile;
use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::Semaphore;
use tower_http::cors::CorsLayer;

use crate::facade::{CompileResponse, CompilerHandle};
use crate::runner::{Attachment, RunError, RunResult};

pub const MAX_BODY_BYTES: usize = 1 << 20;
pub const DEFAULT_MAX_CONCURRENCY: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    Deterministic,
    Llm,
}

/// Handles the service can dispatch to. The LLM handle is optional; requests
/// for it fail with an `llm`-stage error when it is missing.
pub struct ServiceConfig {
    pub deterministic: CompilerHandle,
    pub llm: Option<CompilerHandle>,
    pub default_backend: BackendChoice,
    pub max_concurrency: usize,
}

struct AppState {
    config: ServiceConfig,
    runs: Arc<Semaphore>,
}

#[derive(Deserialize)]
struct CompileRequest {
    source: String,
    #[serde(default)]
    backend: Option<BackendChoice>,
    #[serde(default)]
    origin: Option<String>,
}

#[derive(Deserialize)]
struct AttachmentDto {
    name: String,
    content_base64: String,
}

#[derive(Deserialize)]
struct RunRequest {
    source: String,
    #[serde(default)]
    backend: Option<BackendChoice>,
    #[serde(default)]
    origin: Option<String>,
    #[serde(default)]
    attachments: Vec<AttachmentDto>,
    #[serde(default)]
    stdin: Option<String>,
}

#[derive(Serialize)]
struct RunResponse {
    compile: CompileResponse,
    #[serde(skip_serializing_if = "Option::is_none")]
    run: Option<RunResult>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "ok": false, "error": message.into() }))).into_response()
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, String> {
    serde_json::from_slice(body).map_err(|e| format!("malformed request: {e}"))
}

fn llm_unavailable() -> CompileResponse {
    CompileResponse::failure(
        crate::facade::ErrorStage::Llm,
        apl_core::Diagnostic::new(
            "llm",
            "the LLM backend is not configured on this server",
            "خدمة نموذج اللغة غير مهيأة على هذا الخادم",
            None,
        ),
    )
}

impl AppState {
    fn handle(&self, choice: Option<BackendChoice>) -> Option<&CompilerHandle> {
        match choice.unwrap_or(self.config.default_backend) {
            BackendChoice::Deterministic => Some(&self.config.deterministic),
            BackendChoice::Llm => self.config.llm.as_ref(),
        }
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "ok": true }))
}

async fn compile(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: CompileRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(msg) => return error(StatusCode::BAD_REQUEST, msg),
    };
    let task = tokio::task::spawn_blocking(move || {
        let source = SourceFile::new(req.source, req.origin.unwrap_or_else(|| "playground.apl".into()));
        match state.handle(req.backend) {
            Some(handle) => handle.compile(&source),
            None => llm_unavailable(),
        }
    });
    match task.await {
        Ok(resp) => Json(resp).into_response(),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("internal error: {e}")),
    }
}

async fn run(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: RunRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(msg) => return error(StatusCode::BAD_REQUEST, msg),
    };
    let mut attachments = Vec::with_capacity(req.attachments.len());
    for a in req.attachments {
        match base64::engine::general_purpose::STANDARD.decode(a.content_base64.as_bytes()) {
            Ok(content) => attachments.push(Attachment::new(a.name, content)),
            Err(e) => return error(StatusCode::BAD_REQUEST, format!("attachment {:?}: invalid base64: {e}", a.name)),
        }
    }
    let Ok(permit) = state.runs.clone().acquire_owned().await else {
        return error(StatusCode::INTERNAL_SERVER_ERROR, "run limiter closed");
    };
    let task = tokio::task::spawn_blocking(move || {
        let _permit = permit;
        let source = SourceFile::new(req.source, req.origin.unwrap_or_else(|| "playground.apl".into()));
        let Some(handle) = state.handle(req.backend) else {
            return Ok(RunResponse { compile: llm_unavailable(), run: None });
        };
        let mut policy = handle.run_policy().clone();
        policy.stdin = req.stdin;
        handle
            .compile_and_run_with(&source, &attachments, &policy)
            .map(|(compile, run)| RunResponse { compile, run })
    });
    match task.await {
        Ok(Ok(resp)) => Json(resp).into_response(),
        Ok(Err(e @ RunError::AttachmentRejected(_))) => error(StatusCode::BAD_REQUEST, e.to_string()),
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("internal error: {e}")),
    }
}

pub fn router(config: ServiceConfig) -> Router {
    let runs = Arc::new(Semaphore::new(config.max_concurrency.max(1)));
    let state = Arc::new(AppState { config, runs });
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/compile", post(compile))
        .route("/v1/run", post(run))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

pub async fn serve_on(listener: TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    axum::serve(listener, router(config)).await
}

/// Binds `addr` and serves until the process exits.
pub async fn serve(config: ServiceConfig, addr: SocketAddr) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    serve_on(listener, config).await
}
