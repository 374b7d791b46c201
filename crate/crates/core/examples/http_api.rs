//! Drive the HTTP API in-process: upload, label, train, inspect, extract.

use axum::body::Body;
use axum::http::Request;
use fuzzwrap::evaluator::{generate_corpus, AnomalyProfile};
use fuzzwrap::service::{router, AppState};
use fuzzwrap::store::ProjectStore;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: Value) -> Value {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(if body.is_null() { Body::empty() } else { Body::from(body.to_string()) })
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value: Value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    println!("{method} {uri} -> {status}");
    value
}

#[tokio::main(flavor = "current_thread")]
async fn main() {
    let root = tempfile::tempdir().unwrap();
    let app = router(AppState::new(ProjectStore::open(root.path()).unwrap()));
    let corpus = generate_corpus(&AnomalyProfile::regular(), 4, 2).unwrap();

    let mut ids = Vec::new();
    for page in &corpus.pages {
        let created = call(&app, "POST", "/pages", json!({ "html": page.html })).await;
        let id = created["id"].as_str().unwrap().to_string();
        let labels = json!({
            "global": page.labels.global,
            "records": page.labels.records,
            "attributes": page.labels.attributes,
        });
        call(&app, "PUT", &format!("/pages/{id}/labels"), labels).await;
        ids.push(id);
    }

    let trained = call(&app, "POST", "/train", json!({ "pages": &ids[..3], "config": { "tau": 0.25 } })).await;
    let model_id = trained["model_id"].as_str().unwrap();
    let summary = call(&app, "GET", &format!("/models/{model_id}"), Value::Null).await;
    println!("  moyL {} with {} separators", summary["moyl"], summary["separators"].as_array().unwrap().len());

    let result = call(&app, "POST", &format!("/models/{model_id}/extract?page={}", ids[3]), Value::Null).await;
    println!("  {} tuples", result["tuples"].as_array().unwrap().len());

    let error = call(&app, "GET", "/pages/ffffffffffffffff", Value::Null).await;
    println!("  {error}");
}
