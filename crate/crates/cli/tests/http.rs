use std::sync::Arc;

use alcurve_cli::server::{router, AppState, CreateResponse, LabelsResponse};
use alcurve_core::session::{GraphView, QueryView, SessionConfig, SessionExport, SessionGraph, SessionStore, StatusView};
use alcurve_core::synthetic::{generate_synthetic, SyntheticConfig};
use alcurve_core::SampleGraph;
use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use tower::ServiceExt;

fn synthetic() -> SampleGraph {
    generate_synthetic(&SyntheticConfig {
        n_points: 80,
        ..Default::default()
    })
    .unwrap()
}

fn app_with(store: SessionStore, budget: usize) -> Router {
    let graph = SessionGraph::from_samples(synthetic()).unwrap();
    let config = SessionConfig {
        budget,
        ..Default::default()
    };
    router(Arc::new(AppState::new(store, Some(graph), config)))
}

fn app(budget: usize) -> Router {
    app_with(SessionStore::in_memory(), budget)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    (status, to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec())
}

async fn call_json<T: DeserializeOwned>(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, T) {
    let (status, bytes) = call(app, method, uri, body).await;
    let parsed = serde_json::from_slice(&bytes)
        .unwrap_or_else(|e| panic!("{status} {}: {e}", String::from_utf8_lossy(&bytes)));
    (status, parsed)
}

fn truthful(graph: &SampleGraph, query: &QueryView) -> Value {
    let labels: Vec<Value> = query
        .indices
        .iter()
        .map(|&i| json!({"index": i, "label": u8::from(graph.sample(i).gt_label.unwrap())}))
        .collect();
    json!({ "labels": labels })
}

#[tokio::test]
async fn create_query_label_loop() {
    let app = app(16);
    let graph = synthetic();
    let (status, created): (_, CreateResponse) = call_json(&app, "POST", "/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(created.status.iteration, 0);
    assert_eq!(created.query.indices.len(), 2);
    let id = created.session;

    let (_, query): (_, QueryView) = call_json(&app, "GET", &format!("/sessions/{id}/query"), None).await;
    assert_eq!(query.indices, created.query.indices);

    let mut iterations = 0;
    let mut query = query;
    while !query.indices.is_empty() {
        let body = truthful(&graph, &query);
        let (status, next): (_, LabelsResponse) =
            call_json(&app, "POST", &format!("/sessions/{id}/labels"), Some(body)).await;
        assert_eq!(status, StatusCode::OK);
        iterations += 1;
        assert_eq!(next.status.iteration, iterations);
        assert_eq!(next.status.labeled, 2 * iterations);
        query = next.query;
    }
    let (_, status): (_, StatusView) = call_json(&app, "GET", &format!("/sessions/{id}/status"), None).await;
    assert_eq!(status.labeled, 16);
    assert_eq!(serde_json::to_value(status.status).unwrap(), "complete");
}

#[tokio::test]
async fn rejects_bad_submissions_without_changing_state() {
    let app = app(20);
    let graph = synthetic();
    let (_, created): (_, CreateResponse) = call_json(&app, "POST", "/sessions", None).await;
    let id = created.session;
    let uri = format!("/sessions/{id}/labels");

    let partial = json!({"labels": [{"index": created.query.indices[0], "label": 1}]});
    let (status, err): (_, Value) = call_json(&app, "POST", &uri, Some(partial)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["kind"], "batch_mismatch");

    let (status, _) = call(&app, "POST", &uri, Some(json!({"labels": [{"index": 0, "label": 7}]}))).await;
    assert!(status.is_client_error());

    let (_, after): (_, StatusView) = call_json(&app, "GET", &format!("/sessions/{id}/status"), None).await;
    assert_eq!((after.iteration, after.labeled), (0, 0));

    let body = truthful(&graph, &created.query);
    let (status, _) = call(&app, "POST", &uri, Some(body.clone())).await;
    assert_eq!(status, StatusCode::OK);
    let (status, err): (_, Value) = call_json(&app, "POST", &uri, Some(body)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["kind"], "duplicate_label");
}

#[tokio::test]
async fn unknown_sessions_and_bad_graphs() {
    let app = app(20);
    let (status, _) = call(&app, "GET", "/sessions/missing/query", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let empty = json!({"graph": {"feature_dim": 1, "nodes": [], "edges": []}});
    let (status, err): (_, Value) = call_json(&app, "POST", "/sessions", Some(empty)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["kind"], "invalid_graph");
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({"graph": {"what": 1}}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn distinct_ids_and_uploaded_spatial_graph() {
    let app = app(20);
    let (_, a): (_, CreateResponse) = call_json(&app, "POST", "/sessions", None).await;
    let (_, b): (_, CreateResponse) = call_json(&app, "POST", "/sessions", None).await;
    assert_ne!(a.session, b.session);

    let spatial = json!({
        "feature_dim": 1,
        "nodes": [{"id": 1, "x": 0.0, "y": 0.0}, {"id": 2, "x": 10.0, "y": 0.0}, {"id": 3, "x": 10.0, "y": 10.0}],
        "edges": [
            {"id": 7, "node_a": 1, "node_b": 2, "polyline": [[0.0, 0.0], [10.0, 0.0]], "features": [0.2]},
            {"id": 8, "node_a": 2, "node_b": 3, "polyline": [[10.0, 0.0], [10.0, 10.0]], "features": [0.9]}
        ]
    });
    let req = json!({"graph": spatial, "strategy": "rs", "k": 1, "budget": 2});
    let (status, c): (_, CreateResponse) = call_json(&app, "POST", "/sessions", Some(req)).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(c.query.items.len(), 1);
    assert!(c.query.items[0].polyline.is_some());
    let (_, g): (_, GraphView) = call_json(&app, "GET", &format!("/sessions/{}/graph", c.session), None).await;
    assert_eq!(g.samples.len(), 2);
    assert_eq!(g.adjacency, vec![[0, 1]]);
    assert_eq!(g.nodes.unwrap().len(), 3);
    assert_eq!(g.current_batch, c.query.indices);
}

#[tokio::test]
async fn export_is_versioned_and_restorable() {
    let dir = tempfile::tempdir().unwrap();
    let graph = synthetic();
    let app = app_with(SessionStore::open(dir.path()).unwrap(), 30);
    let (_, created): (_, CreateResponse) = call_json(&app, "POST", "/sessions", None).await;
    let id = created.session;
    let mut query = created.query;
    for _ in 0..5 {
        let (_, next): (_, LabelsResponse) =
            call_json(&app, "POST", &format!("/sessions/{id}/labels"), Some(truthful(&graph, &query))).await;
        query = next.query;
    }
    let (status, bytes) = call(&app, "GET", &format!("/sessions/{id}/export"), None).await;
    assert_eq!(status, StatusCode::OK);
    let export = SessionExport::from_json(std::str::from_utf8(&bytes).unwrap()).unwrap();
    assert_eq!(export.version, 1);
    assert_eq!(export.labels.len(), 10);
    assert_eq!(export.pending.as_ref().unwrap().indices, query.indices);

    let restored = alcurve_core::session::Session::restore(
        Arc::new(SessionGraph::from_samples(graph.clone()).unwrap()),
        &export,
    )
    .unwrap();
    assert_eq!(restored.current_batch().unwrap().indices, query.indices);

    // A server restarted on the same directory resumes the session.
    let app = app_with(SessionStore::open(dir.path()).unwrap(), 30);
    let (_, resumed): (_, QueryView) = call_json(&app, "GET", &format!("/sessions/{id}/query"), None).await;
    assert_eq!(resumed.indices, query.indices);
    assert_eq!(resumed.iteration, 5);
}
