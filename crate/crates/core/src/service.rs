//! HTTP API over a [`ProjectStore`] for the labelling front end.
//!
//! | method | path | body | response |
//! |---|---|---|---|
//! | POST | `/pages` | `{"html"}` | `{"id", "tokens"}` |
//! | GET | `/pages/{id}` | | `{"id", "html", "tokens", "labels"}` |
//! | PUT | `/pages/{id}/labels` | `{"global", "records", "attributes"}` | stored labels |
//! | POST | `/train` | `{"pages", "config"?}` | `{"model_id", "moyl"}` |
//! | GET | `/models/{id}` | | model summary |
//! | POST | `/models/{id}/extract?page={pid}` | | extraction result |
//! | POST | `/corpora` | `{"profile", "seed", "pages"}` | `{"corpus_id"}` |
//! | POST | `/eval` | `{"model_id", "corpus_id"}` | evaluation report |
//!
//! Errors are `{"error": <name>, "message", "offset"?}` with 404 for unknown
//! ids, 409 when an identical training job is already running and 422 for
//! invalid labels or a page without a global zone.

use std::collections::HashSet;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::evaluator::corpus::{generate_corpus, AnomalyProfile};
use crate::evaluator::{evaluate, EvalReport};
use crate::extractor::{extract, ExtractError, ExtractionResult};
use crate::induction::{Calibration, WrapperConfig};
use crate::page_model::{AttributeLabel, Edge, Span, ZoneKind, ZoneLabels};
use crate::store::{content_id, ProjectStore, StoreError};
use crate::tokenizer::{tokenize, Token};

#[derive(Debug)]
pub struct AppState {
    pub store: ProjectStore,
    jobs: Mutex<HashSet<String>>,
}

impl AppState {
    pub fn new(store: ProjectStore) -> Arc<Self> {
        Arc::new(AppState { store, jobs: Mutex::new(HashSet::new()) })
    }
}

/// An error response.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    name: String,
    message: String,
    offset: Option<usize>,
}

impl ApiError {
    fn new(status: StatusCode, name: &str, message: impl Into<String>) -> Self {
        ApiError { status, name: name.to_string(), message: message.into(), offset: None }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.name, "message": self.message });
        if let Some(offset) = self.offset {
            body["offset"] = json!(offset);
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::UnknownPage(_) => ApiError::new(StatusCode::NOT_FOUND, "UnknownPage", message),
            StoreError::UnknownModel(_) => ApiError::new(StatusCode::NOT_FOUND, "UnknownModel", message),
            StoreError::UnknownCorpus(_) => ApiError::new(StatusCode::NOT_FOUND, "UnknownCorpus", message),
            StoreError::MissingLabels(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "MissingLabels", message)
            }
            StoreError::Label(label) => ApiError {
                offset: label.offset(),
                ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, label.name(), message)
            },
            StoreError::Train(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "TrainError", message),
            StoreError::Corpus(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "CorpusError", message),
            StoreError::Io(_) | StoreError::Format(_) => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "StoreError", message)
            }
        }
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "TaskFailed", e.to_string()))?
}

#[derive(Debug, Deserialize)]
pub struct NewPage {
    pub html: String,
}

#[derive(Debug, Serialize)]
pub struct PageCreated {
    pub id: String,
    pub tokens: Vec<Token>,
}

#[derive(Debug, Serialize)]
pub struct PageView {
    pub id: String,
    pub html: String,
    pub tokens: Vec<Token>,
    pub labels: Option<ZoneLabels>,
}

/// Label body of `PUT /pages/{id}/labels`; the page id comes from the path.
#[derive(Debug, Deserialize)]
pub struct LabelsBody {
    pub global: Span,
    pub records: Vec<Span>,
    pub attributes: Vec<Vec<AttributeLabel>>,
}

#[derive(Debug, Deserialize)]
pub struct TrainRequest {
    pub pages: Vec<String>,
    #[serde(default)]
    pub config: WrapperConfig,
}

#[derive(Debug, Serialize)]
pub struct Trained {
    pub model_id: String,
    pub moyl: usize,
}

#[derive(Debug, Serialize)]
pub struct DetectorSummary {
    #[serde(flatten)]
    pub calibration: Calibration,
    pub n_instances: u32,
}

#[derive(Debug, Serialize)]
pub struct SeparatorSummary {
    pub zone: ZoneKind,
    pub edge: Edge,
    pub left: DetectorSummary,
    pub right: DetectorSummary,
}

#[derive(Debug, Serialize)]
pub struct ModelSummary {
    pub model_id: String,
    pub moyl: usize,
    pub config: WrapperConfig,
    pub attributes: Vec<String>,
    pub separators: Vec<SeparatorSummary>,
}

#[derive(Debug, Deserialize)]
pub struct ExtractQuery {
    pub page: String,
}

#[derive(Debug, Deserialize)]
pub struct CorpusRequest {
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pages")]
    pub pages: usize,
}

fn default_profile() -> String {
    "regular".into()
}

fn default_pages() -> usize {
    10
}

#[derive(Debug, Deserialize)]
pub struct EvalRequest {
    pub model_id: String,
    pub corpus_id: String,
}

async fn create_page(State(app): State<Arc<AppState>>, Json(body): Json<NewPage>) -> ApiResult<PageCreated> {
    let id = blocking({
        let app = app.clone();
        let html = body.html.clone();
        move || Ok(app.store.put_page(&html)?)
    })
    .await?;
    tracing::info!(page = %id, "page stored");
    Ok(Json(PageCreated { id, tokens: tokenize(&body.html) }))
}

async fn get_page(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<PageView> {
    blocking(move || {
        let html = app.store.page(&id)?;
        let labels = app.store.labels(&id)?;
        Ok(Json(PageView { tokens: tokenize(&html), id, html, labels }))
    })
    .await
}

async fn put_labels(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(body): Json<LabelsBody>,
) -> ApiResult<ZoneLabels> {
    blocking(move || {
        let labels = ZoneLabels {
            page_id: id.clone(),
            global: body.global,
            records: body.records,
            attributes: body.attributes,
        };
        let stored = app.store.put_labels(&id, &labels)?;
        tracing::info!(page = %id, records = stored.records.len(), "labels stored");
        Ok(Json(stored))
    })
    .await
}

/// Removes a job key when the job ends, whatever the outcome.
struct JobGuard {
    app: Arc<AppState>,
    key: String,
}

impl Drop for JobGuard {
    fn drop(&mut self) {
        self.app.jobs.lock().expect("jobs lock").remove(&self.key);
    }
}

async fn train_model(State(app): State<Arc<AppState>>, Json(body): Json<TrainRequest>) -> ApiResult<Trained> {
    let key_source = serde_json::to_vec(&(&body.pages, &body.config)).expect("request serialises");
    let key = content_id(&key_source);
    if !app.jobs.lock().expect("jobs lock").insert(key.clone()) {
        return Err(ApiError::new(StatusCode::CONFLICT, "TrainingInProgress", "an identical training job is running"));
    }
    let guard = JobGuard { app: app.clone(), key };
    blocking(move || {
        let _guard = guard;
        let (model_id, model) = app.store.train(&body.pages, &body.config)?;
        tracing::info!(model = %model_id, pages = body.pages.len(), "model trained");
        Ok(Json(Trained { model_id, moyl: model.moyl.get() }))
    })
    .await
}

async fn get_model(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<ModelSummary> {
    blocking(move || {
        let model = app.store.model(&id)?;
        let detector = |d: &crate::induction::DetectorModel| DetectorSummary {
            calibration: d.calibration,
            n_instances: d.matrix.n_instances,
        };
        let separators = model
            .separators
            .iter()
            .map(|s| SeparatorSummary {
                zone: s.zone.clone(),
                edge: s.edge,
                left: detector(&s.left),
                right: detector(&s.right),
            })
            .collect();
        Ok(Json(ModelSummary {
            model_id: id,
            moyl: model.moyl.get(),
            attributes: model.attribute_names(),
            config: model.config,
            separators,
        }))
    })
    .await
}

async fn extract_page(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(query): Query<ExtractQuery>,
) -> ApiResult<ExtractionResult> {
    blocking(move || {
        let model = app.store.model(&id)?;
        let html = app.store.page(&query.page)?;
        let result = extract(&query.page, &html, &model).map_err(|e| match e {
            ExtractError::GlobalZoneNotFound => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "GlobalZoneNotFound", e.to_string())
            }
        })?;
        app.store.put_result(&id, &result)?;
        Ok(Json(result))
    })
    .await
}

async fn create_corpus(State(app): State<Arc<AppState>>, Json(body): Json<CorpusRequest>) -> ApiResult<Value> {
    blocking(move || {
        let profile = AnomalyProfile::preset(&body.profile).ok_or_else(|| {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "UnknownProfile", format!("unknown profile `{}`", body.profile))
        })?;
        let corpus = generate_corpus(&profile, body.pages, body.seed).map_err(StoreError::from)?;
        let corpus_id = app.store.put_corpus(&corpus)?;
        Ok(Json(json!({ "corpus_id": corpus_id })))
    })
    .await
}

async fn eval_model(State(app): State<Arc<AppState>>, Json(body): Json<EvalRequest>) -> ApiResult<EvalReport> {
    blocking(move || {
        let model = app.store.model(&body.model_id)?;
        let corpus = app.store.corpus(&body.corpus_id)?;
        let report = evaluate(&corpus, &model)
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ZeroTotal", e.to_string()))?;
        Ok(Json(report))
    })
    .await
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/pages", post(create_page))
        .route("/pages/{id}", get(get_page))
        .route("/pages/{id}/labels", put(put_labels))
        .route("/train", post(train_model))
        .route("/models/{id}", get(get_model))
        .route("/models/{id}/extract", post(extract_page))
        .route("/corpora", post(create_corpus))
        .route("/eval", post(eval_model))
        .with_state(app)
}

/// Serve the API on `addr` until the process is stopped.
pub async fn serve(store: ProjectStore, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, root = %store.root().display(), "serving");
    axum::serve(listener, router(AppState::new(store))).await
}
