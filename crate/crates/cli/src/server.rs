//! HTTP interface to annotation sessions.

use std::sync::Arc;

use alcurve_core::session::{LabeledSample, QueryView, SessionConfig, SessionGraph, SessionStore, StatusView};
use alcurve_core::strategy::{StrategyConfig, StrategyKind};
use alcurve_core::Error;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

pub struct AppState {
    pub store: SessionStore,
    /// Graph used when a creation request carries none.
    pub default_graph: Option<Arc<SessionGraph>>,
    pub default_config: SessionConfig,
}

impl AppState {
    pub fn new(store: SessionStore, default_graph: Option<SessionGraph>, default_config: SessionConfig) -> Self {
        Self {
            store,
            default_graph: default_graph.map(Arc::new),
            default_config,
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}/query", get(get_query))
        .route("/sessions/{id}/labels", post(submit_labels))
        .route("/sessions/{id}/status", get(get_status))
        .route("/sessions/{id}/export", get(export_session))
        .route("/sessions/{id}/graph", get(get_graph))
        .with_state(state)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub kind: String,
}

pub struct ApiError(Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = match &self.0 {
            Error::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            Error::BatchMismatch { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "batch_mismatch"),
            Error::DuplicateLabel(_) => (StatusCode::CONFLICT, "duplicate_label"),
            Error::InvalidState(_) => (StatusCode::CONFLICT, "invalid_state"),
            Error::EmptyGraph | Error::InvalidGraph(_) | Error::Parse(_) | Error::Json(_) => {
                (StatusCode::BAD_REQUEST, "invalid_graph")
            }
            Error::InvalidConfig(_) | Error::DimensionMismatch { .. } | Error::IndexOutOfRange { .. } => {
                (StatusCode::BAD_REQUEST, "invalid_request")
            }
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        let body = ErrorBody {
            error: self.0.to_string(),
            kind: kind.into(),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CreateRequest {
    /// A spatial-graph or sample-graph document.
    pub graph: Option<serde_json::Value>,
    pub strategy: Option<StrategyKind>,
    pub k: Option<usize>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreateResponse {
    pub session: String,
    pub status: StatusView,
    pub query: QueryView,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LabelsRequest {
    pub labels: Vec<LabeledSample>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LabelsResponse {
    pub status: StatusView,
    pub query: QueryView,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionList {
    pub sessions: Vec<String>,
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, Error> + Send + 'static) -> Result<T, ApiError> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError),
        Err(e) => Err(ApiError(Error::InvalidState(format!("worker failed: {e}")))),
    }
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Option<Json<CreateRequest>>,
) -> Result<(StatusCode, Json<CreateResponse>), ApiError> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let mut config = state.default_config.clone();
    if let Some(kind) = req.strategy {
        config.strategy = StrategyConfig {
            kind,
            ..config.strategy
        };
    }
    if let Some(k) = req.k {
        config.strategy.k = k;
    }
    if let Some(b) = req.budget {
        config.budget = b;
    }
    if let Some(s) = req.seed {
        config.seed = s;
    }
    let st = Arc::clone(&state);
    let response = blocking(move || {
        let graph = match req.graph {
            Some(doc) => SessionGraph::from_json(&doc.to_string())?,
            None => match &st.default_graph {
                Some(g) => (**g).clone(),
                None => return Err(Error::InvalidConfig("request has no graph and the server has no default".into())),
            },
        };
        let id = st.store.create(graph, config)?;
        let (status, query) = st.store.with(&id, |s| (s.status_view(), s.query_view()))?;
        Ok(CreateResponse {
            session: id,
            status,
            query,
        })
    })
    .await?;
    Ok((StatusCode::CREATED, Json(response)))
}

async fn list_sessions(State(state): State<Arc<AppState>>) -> Json<SessionList> {
    Json(SessionList {
        sessions: state.store.ids(),
    })
}

async fn get_query(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<QueryView> {
    Ok(Json(state.store.with(&id, |s| s.query_view())?))
}

async fn get_status(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusView> {
    Ok(Json(state.store.with(&id, |s| s.status_view())?))
}

async fn get_graph(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<alcurve_core::session::GraphView> {
    Ok(Json(state.store.with(&id, |s| s.graph_view())?))
}

async fn export_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<alcurve_core::session::SessionExport> {
    let export = state.store.with(&id, |s| s.export())??;
    Ok(Json(export))
}

async fn submit_labels(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<LabelsRequest>,
) -> ApiResult<LabelsResponse> {
    let response = blocking(move || {
        let status = state.store.submit(&id, &req.labels)?;
        let query = state.store.with(&id, |s| s.query_view())?;
        Ok(LabelsResponse { status, query })
    })
    .await?;
    Ok(Json(response))
}
