//! HTTP front door for the engine.
//!
//! | route                 | body                                   |
//! |-----------------------|----------------------------------------|
//! | `POST /v1/parse`      | `{"text": str}` → [`ParseResponse`]    |
//! | `GET /v1/state`       | current [`SessionState`]               |
//! | `GET /v1/state/stream`| server-sent events, one state each     |
//! | `GET /v1/apps`        | manifest echo plus widget hints        |
//! | `GET /v1/health`      | `{"ok": true}`                         |
//!
//! The session is named by the `X-Session` header (default `"default"`).

use std::convert::Infallible;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::Stream;
use indexmap::IndexMap;
use lmui_core::engine::ClassificationSummary;
use lmui_core::tree::ManifestApp;
use lmui_core::{Engine, EngineError, SessionState, StatePatch};
use serde::{Deserialize, Serialize};
use tokio_stream::wrappers::UnboundedReceiverStream;
use tokio_stream::StreamExt;
use tower_http::cors::CorsLayer;

pub const SESSION_HEADER: &str = "x-session";
pub const DEFAULT_SESSION: &str = "default";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParseRequest {
    pub text: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParseResponse {
    pub patch: StatePatch,
    pub classification: ClassificationSummary,
    pub state: SessionState,
    pub derived: IndexMap<String, String>,
    pub latency_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationSummary>,
}

/// An [`EngineError`] with its HTTP status.
#[derive(Debug)]
pub struct ApiError(pub EngineError);

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match &self.0 {
            EngineError::EmptyUtterance | EngineError::NoContent => StatusCode::BAD_REQUEST,
            EngineError::ClarificationNeeded { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            EngineError::BackendUnavailable(_) => StatusCode::SERVICE_UNAVAILABLE,
            EngineError::Store(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn body(&self) -> ErrorBody {
        let (error, classification) = match &self.0 {
            EngineError::EmptyUtterance => ("empty_utterance", None),
            EngineError::NoContent => ("no_content", None),
            EngineError::ClarificationNeeded { classification } => {
                ("clarification_needed", Some(classification.clone()))
            }
            EngineError::BackendUnavailable(_) => ("backend_unavailable", None),
            EngineError::Store(_) => ("store_error", None),
        };
        ErrorBody {
            error: error.to_string(),
            message: self.0.to_string(),
            classification,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self.body())).into_response()
    }
}

/// Runs the pipeline for one utterance and times it.
pub fn handle_parse(engine: &Engine, session: &str, text: &str) -> Result<ParseResponse, ApiError> {
    let start = Instant::now();
    let outcome = engine.parse(session, text).map_err(ApiError)?;
    Ok(ParseResponse {
        patch: outcome.patch,
        classification: outcome.classification,
        state: outcome.state,
        derived: outcome.derived,
        latency_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AppsResponse {
    pub apps: Vec<ManifestApp>,
    /// Application → parameter → widget kind.
    pub widgets: IndexMap<String, IndexMap<String, lmui_core::apps::WidgetKind>>,
}

pub fn apps_response(engine: &Engine) -> AppsResponse {
    let widgets = engine
        .library()
        .apps()
        .map(|app| {
            let kinds = app
                .parameters
                .iter()
                .map(|(name, spec)| (name.clone(), spec.widget))
                .collect();
            (app.name.clone(), kinds)
        })
        .collect();
    AppsResponse {
        apps: engine.tree().manifest().apps.clone(),
        widgets,
    }
}

fn session_of(headers: &HeaderMap) -> String {
    headers
        .get(SESSION_HEADER)
        .and_then(|v| v.to_str().ok())
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .unwrap_or(DEFAULT_SESSION)
        .to_string()
}

async fn parse(
    State(engine): State<Arc<Engine>>,
    headers: HeaderMap,
    Json(req): Json<ParseRequest>,
) -> Result<Json<ParseResponse>, ApiError> {
    let session = session_of(&headers);
    let start = Instant::now();
    let mut response = tokio::task::spawn_blocking(move || handle_parse(&engine, &session, &req.text))
        .await
        .map_err(|e| ApiError(EngineError::BackendUnavailable(e.to_string())))??;
    response.latency_ms = start.elapsed().as_secs_f64() * 1000.0;
    tracing::debug!(app = %response.patch.current_app, latency_ms = response.latency_ms, "parsed");
    Ok(Json(response))
}

async fn state(State(engine): State<Arc<Engine>>, headers: HeaderMap) -> Result<Json<SessionState>, ApiError> {
    let session = session_of(&headers);
    let snapshot = engine.store().snapshot(&session).map_err(|e| ApiError(e.into()))?;
    Ok(Json(snapshot))
}

async fn stream(
    State(engine): State<Arc<Engine>>,
    headers: HeaderMap,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let session = session_of(&headers);
    let subscription = engine.store().subscribe(&session).map_err(|e| ApiError(e.into()))?;
    let events = UnboundedReceiverStream::new(subscription.into_receiver()).map(|state| {
        let event = Event::default()
            .event("state")
            .id(state.version.to_string())
            .json_data(&*state)
            .expect("session state serializes");
        Ok(event)
    });
    Ok(Sse::new(events).keep_alive(KeepAlive::default()))
}

async fn apps(State(engine): State<Arc<Engine>>) -> Json<AppsResponse> {
    Json(apps_response(&engine))
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "ok": true }))
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/v1/parse", post(parse))
        .route("/v1/state", get(state))
        .route("/v1/state/stream", get(stream))
        .route("/v1/apps", get(apps))
        .route("/v1/health", get(health))
        .layer(CorsLayer::permissive())
        .with_state(engine)
}
