//! HTTP inference service.
//!
//! - `GET /health`: liveness.
//! - `GET /models`: registered models with type and vocabulary size.
//! - `POST /predict`: `{"text": ..., "model": optional id}` to a
//!   [`PredictResponse`].
//!
//! Models are loaded once at startup into a read-only [`Registry`]. A model's
//! id is its file name without `.json` and without a trailing `.model`.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::trace::TraceLayer;

use crate::corpus::SentimentLabel;
use crate::models::{Contribution, ModelKind, ScoreKind};
use crate::persistence::{load_model, PersistenceError};
use crate::pipeline::SentimentModel;

/// Longest accepted request text, in characters.
pub const MAX_TEXT_CHARS: usize = 10_000;

pub const ENV_BIND: &str = "ULASAN_BIND";
pub const ENV_MODEL_DIR: &str = "ULASAN_MODEL_DIR";
pub const ENV_CORS_ORIGINS: &str = "ULASAN_CORS_ORIGINS";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("no model envelopes given")]
    NoModels,
    #[error("failed to load model {path}: {source}")]
    Load {
        path: PathBuf,
        #[source]
        source: PersistenceError,
    },
    #[error("duplicate model id `{0}`")]
    DuplicateId(String),
    #[error("cannot read model directory {path}: {source}")]
    ModelDir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid CORS origin `{0}`")]
    CorsOrigin(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable id → model map. The first id in sorted order is the default.
#[derive(Debug)]
pub struct Registry {
    models: BTreeMap<String, SentimentModel>,
}

/// `logreg.model.json` → `logreg`.
pub fn model_id(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    stem.strip_suffix(".model")
        .map(str::to_string)
        .unwrap_or(stem)
}

impl Registry {
    pub fn new(
        models: impl IntoIterator<Item = (String, SentimentModel)>,
    ) -> Result<Self, ServeError> {
        let mut map = BTreeMap::new();
        for (id, model) in models {
            if map.insert(id.clone(), model).is_some() {
                return Err(ServeError::DuplicateId(id));
            }
        }
        if map.is_empty() {
            return Err(ServeError::NoModels);
        }
        Ok(Self { models: map })
    }

    /// Loads every path; any failure aborts.
    pub fn load(paths: &[PathBuf]) -> Result<Self, ServeError> {
        let mut models = Vec::with_capacity(paths.len());
        for path in paths {
            let model = load_model(path).map_err(|source| ServeError::Load {
                path: path.clone(),
                source,
            })?;
            models.push((model_id(path), model));
        }
        Self::new(models)
    }

    pub fn get(&self, id: &str) -> Option<&SentimentModel> {
        self.models.get(id)
    }

    pub fn default_id(&self) -> &str {
        self.models.keys().next().expect("registry is never empty")
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

/// `*.model.json` files in `dir`, sorted by name.
pub fn model_paths_in(dir: &Path) -> Result<Vec<PathBuf>, ServeError> {
    let entries = std::fs::read_dir(dir).map_err(|source| ServeError::ModelDir {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|source| ServeError::ModelDir {
                path: dir.to_path_buf(),
                source,
            })?
            .path();
        let is_envelope = path
            .file_name()
            .is_some_and(|n| n.to_string_lossy().ends_with(".model.json"));
        if is_envelope && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictRequest {
    pub text: String,
    #[serde(default)]
    pub model: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub label: String,
    /// Class name → score.
    pub scores: BTreeMap<String, f64>,
    pub score_kind: ScoreKind,
    pub top_features: Vec<Contribution>,
    pub cleaned_text: String,
    pub model: String,
    pub latency_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub id: String,
    pub model_type: ModelKind,
    pub vocabulary_size: usize,
    pub default: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

/// Builds the response body for one text; `latency_ms` is left at zero.
pub fn predict_response(model: &SentimentModel, id: &str, text: &str) -> PredictResponse {
    let out = model.predict_text(text);
    let scores = SentimentLabel::ALL
        .iter()
        .map(|l| (l.name().to_string(), out.scores[l.ordinal()]))
        .collect();
    PredictResponse {
        label: out.label.name().to_string(),
        scores,
        score_kind: out.score_kind,
        top_features: out.top_features,
        cleaned_text: out.cleaned_text,
        model: id.to_string(),
        latency_ms: 0.0,
        warning: out.warning,
    }
}

fn error_response(status: StatusCode, error: String) -> Response {
    (status, Json(ErrorBody { error })).into_response()
}

fn bad_request(error: String) -> Response {
    error_response(StatusCode::BAD_REQUEST, error)
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn list_models(State(registry): State<Arc<Registry>>) -> Json<Vec<ModelInfo>> {
    let default = registry.default_id().to_string();
    Json(
        registry
            .models
            .iter()
            .map(|(id, m)| ModelInfo {
                id: id.clone(),
                model_type: m.kind(),
                vocabulary_size: m.vocabulary.len(),
                default: *id == default,
            })
            .collect(),
    )
}

async fn predict(
    State(registry): State<Arc<Registry>>,
    payload: Result<Json<PredictRequest>, JsonRejection>,
) -> Response {
    let started = Instant::now();
    let req = match payload {
        Ok(Json(req)) => req,
        Err(rejection) => return error_response(rejection.status(), rejection.body_text()),
    };
    let chars = req.text.chars().count();
    if chars > MAX_TEXT_CHARS {
        return bad_request(format!(
            "text has {chars} characters; the limit is {MAX_TEXT_CHARS}"
        ));
    }
    let id = req
        .model
        .as_deref()
        .unwrap_or_else(|| registry.default_id());
    let Some(model) = registry.get(id) else {
        return bad_request(format!("unknown model `{id}`"));
    };
    let mut body = predict_response(model, id, &req.text);
    body.latency_ms = started.elapsed().as_secs_f64() * 1000.0;
    Json(body).into_response()
}

/// CORS layer for a comma-separated origin list. `*` allows any origin; an
/// empty list disables cross-origin access.
pub fn cors_layer(origins: &str) -> Result<Option<CorsLayer>, ServeError> {
    let origins: Vec<&str> = origins
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if origins.is_empty() {
        return Ok(None);
    }
    let allow = if origins.contains(&"*") {
        AllowOrigin::any()
    } else {
        let values = origins
            .iter()
            .map(|o| HeaderValue::from_str(o).map_err(|_| ServeError::CorsOrigin(o.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        AllowOrigin::list(values)
    };
    Ok(Some(
        CorsLayer::new()
            .allow_origin(allow)
            .allow_methods([Method::GET, Method::POST])
            .allow_headers([axum::http::header::CONTENT_TYPE]),
    ))
}

pub fn router(registry: Arc<Registry>, cors: Option<CorsLayer>) -> Router {
    let router = Router::new()
        .route("/health", get(health))
        .route("/models", get(list_models))
        .route("/predict", post(predict))
        .with_state(registry)
        .layer(TraceLayer::new_for_http());
    match cors {
        Some(layer) => router.layer(layer),
        None => router,
    }
}

/// Binds `addr` and serves until Ctrl-C or SIGTERM. `on_bound` receives the
/// actual address, which matters when binding port 0.
pub async fn run(
    registry: Arc<Registry>,
    addr: SocketAddr,
    cors: Option<CorsLayer>,
    on_bound: impl FnOnce(SocketAddr),
) -> Result<(), ServeError> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    tracing::info!(%local, models = registry.len(), "listening");
    on_bound(local);
    axum::serve(listener, router(registry, cors))
        .with_graceful_shutdown(shutdown_signal())
        .await?;
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    tracing::info!("shutting down");
}
