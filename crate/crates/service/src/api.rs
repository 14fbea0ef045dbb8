//! The `/v1` HTTP API over a shared [`Repository`].
//!
//! Reads (search, indicators, report) share a read lock; ingestion and
//! refinement take the write lock, so writes are applied one at a time.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query as QueryParams, State};
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;
use tower_http::cors::{AllowOrigin, CorsLayer};

use greylit_core::docmodel::{AccessClass, DocId, SourceDocument, SourceType, ValidationError};
use greylit_core::index::IndexError;
use greylit_core::query::{formulate, run, QueryError, StepOutcome};
use greylit_core::repo::{NewDocument, RefineRequest, RepoError, Repository};

use crate::views::{search_view, IndicatorView, SearchView};

pub type SharedRepo = Arc<RwLock<Repository>>;

pub const IDEMPOTENCY_HEADER: &str = "idempotency-key";

/// Error body: `{"code": "...", "message": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self { status: status.as_u16(), code: code.to_owned(), message: message.into() }
    }

    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

fn index_error(e: &IndexError) -> ApiError {
    match e {
        IndexError::UnknownSourceFilter(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_source", e.to_string()),
        IndexError::ZeroLimit => ApiError::bad_request("invalid_limit", e.to_string()),
        _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
    }
}

fn query_error(e: &QueryError) -> ApiError {
    match e {
        QueryError::BlankIndicator => ApiError::bad_request("blank_query", e.to_string()),
        QueryError::Index(ie) => index_error(ie),
        QueryError::Ledger(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
    }
}

impl From<RepoError> for ApiError {
    fn from(e: RepoError) -> Self {
        match &e {
            RepoError::Validation(ValidationError::DuplicateId(_)) => {
                ApiError::new(StatusCode::CONFLICT, "duplicate_id", e.to_string())
            }
            RepoError::Validation(_) => ApiError::bad_request("invalid_document", e.to_string()),
            RepoError::InvalidId(_) => ApiError::bad_request("invalid_id", e.to_string()),
            RepoError::Ingest(_) => ApiError::bad_request("invalid_payload", e.to_string()),
            RepoError::UnknownIndicator(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_indicator", e.to_string()),
            RepoError::Index(ie) => index_error(ie),
            RepoError::Query(qe) => query_error(qe),
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
        }
    }
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("malformed_request", e.to_string()))
}

/// Body of `POST /v1/sources`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceRequest {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(rename = "type")]
    pub source_type: SourceType,
    pub uri: String,
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub access_class: AccessClass,
    #[serde(default)]
    pub retrieved_at: Option<DateTime<Utc>>,
    /// Raw payload text: HTML, sidecar JSON-lines, CSV or a JSON grid.
    pub payload: String,
    /// Payload file extension, e.g. `csv` or `json`.
    #[serde(default)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestView {
    pub document: SourceDocument,
    pub sentences: usize,
    pub records: usize,
    pub table_facts: usize,
    pub units: usize,
}

async fn post_source(State(repo): State<SharedRepo>, body: Bytes) -> Result<(StatusCode, Json<IngestView>), ApiError> {
    let req: SourceRequest = parse_body(&body)?;
    if req.uri.trim().is_empty() {
        return Err(ApiError::bad_request("invalid_document", "uri must not be empty"));
    }
    let new = NewDocument {
        id: req.id,
        title: req.title.unwrap_or_else(|| req.uri.clone()),
        uri: req.uri,
        source_type: req.source_type,
        access_class: req.access_class,
        retrieved_at: req.retrieved_at.unwrap_or_else(Utc::now),
        payload: req.payload.into_bytes(),
        extension: req.format,
    };
    let mut repo = repo.write().await;
    let (document, out) = repo.ingest(new)?;
    let view = IngestView {
        document,
        sentences: out.sentences.len(),
        records: out.records.len(),
        table_facts: out.facts.len(),
        units: out.units.len(),
    };
    Ok((StatusCode::CREATED, Json(view)))
}

async fn list_sources(State(repo): State<SharedRepo>) -> Json<Vec<SourceDocument>> {
    Json(repo.read().await.documents().to_vec())
}

async fn get_source(State(repo): State<SharedRepo>, Path(id): Path<String>) -> Result<Json<SourceDocument>, ApiError> {
    let repo = repo.read().await;
    repo.document(&DocId::new(&id))
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_source", format!("no source `{id}`")))
}

/// Query string of `GET /v1/search`; `keywords` is comma-separated.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct SearchParams {
    #[serde(default)]
    pub q: String,
    #[serde(default)]
    pub keywords: Option<String>,
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub limit: Option<usize>,
}

pub fn split_keywords(raw: Option<&str>) -> Vec<String> {
    raw.map(|s| s.split(',').map(str::trim).filter(|k| !k.is_empty()).map(str::to_owned).collect())
        .unwrap_or_default()
}

async fn search(
    State(repo): State<SharedRepo>,
    params: Result<QueryParams<SearchParams>, axum::extract::rejection::QueryRejection>,
) -> Result<Json<SearchView>, ApiError> {
    let QueryParams(p) = params.map_err(|e| ApiError::bad_request("malformed_request", e.body_text()))?;
    let keywords = split_keywords(p.keywords.as_deref());
    let source = p.source.as_deref().map(str::trim).filter(|s| !s.is_empty());
    let q = formulate(&p.q, &keywords, source).map_err(|e| query_error(&e))?;
    let repo = repo.read().await;
    let limit = p.limit.unwrap_or(repo.config().search_limit);
    let result = run(&q, repo.index(), limit).map_err(|e| query_error(&e))?;
    Ok(Json(search_view(&repo, q, &result)))
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementView {
    /// `appended`, or `duplicate` when the idempotency key was seen before.
    pub outcome: &'static str,
    pub step: greylit_core::query::LedgerStep,
    pub indicator: IndicatorView,
    pub search: SearchView,
}

async fn post_refinement(
    State(repo): State<SharedRepo>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<(StatusCode, Json<RefinementView>), ApiError> {
    let mut req: RefineRequest = parse_body(&body)?;
    if req.idempotency_key.is_none() {
        req.idempotency_key = headers
            .get(IDEMPOTENCY_HEADER)
            .and_then(|v| v.to_str().ok())
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_owned);
    }
    let mut repo = repo.write().await;
    let out = repo.refine(req)?;
    let (status, outcome) = match out.outcome {
        StepOutcome::Appended => (StatusCode::CREATED, "appended"),
        StepOutcome::Duplicate => (StatusCode::OK, "duplicate"),
    };
    let search = search_view(&repo, out.step.query.clone(), &out.result);
    Ok((status, Json(RefinementView { outcome, step: out.step, indicator: out.record.into(), search })))
}

async fn list_indicators(State(repo): State<SharedRepo>) -> Json<Vec<IndicatorView>> {
    Json(repo.read().await.indicators().into_iter().map(IndicatorView::from).collect())
}

async fn get_indicator(State(repo): State<SharedRepo>, Path(id): Path<String>) -> Result<Json<IndicatorView>, ApiError> {
    Ok(Json(repo.read().await.indicator(&id)?.into()))
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct ReportParams {
    #[serde(default)]
    pub format: Option<String>,
    /// `rows` (default) or `totals`; CSV only.
    #[serde(default)]
    pub table: Option<String>,
}

async fn report(
    State(repo): State<SharedRepo>,
    params: Result<QueryParams<ReportParams>, axum::extract::rejection::QueryRejection>,
) -> Result<Response, ApiError> {
    let QueryParams(p) = params.map_err(|e| ApiError::bad_request("malformed_request", e.body_text()))?;
    let report = repo.read().await.report();
    match (p.format.as_deref().unwrap_or("json"), p.table.as_deref().unwrap_or("rows")) {
        ("json", _) => Ok(([(header::CONTENT_TYPE, "application/json")], report.to_json()).into_response()),
        ("csv", "rows") => Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], report.to_csv()).into_response()),
        ("csv", "totals") => {
            Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], report.totals_csv()).into_response())
        }
        ("csv", t) => Err(ApiError::bad_request("malformed_request", format!("unknown table `{t}`"))),
        (f, _) => Err(ApiError::bad_request("malformed_request", format!("unknown format `{f}`"))),
    }
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

/// CORS policy: `None` allows any origin.
pub fn cors(origin: Option<&str>) -> Result<CorsLayer, ApiError> {
    let allow = match origin {
        None => AllowOrigin::any(),
        Some(o) => AllowOrigin::exact(
            HeaderValue::from_str(o).map_err(|e| ApiError::bad_request("invalid_origin", e.to_string()))?,
        ),
    };
    Ok(CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE, header::HeaderName::from_static(IDEMPOTENCY_HEADER)]))
}

pub fn router(repo: SharedRepo) -> Router {
    let v1 = Router::new()
        .route("/sources", post(post_source).get(list_sources))
        .route("/sources/{id}", get(get_source))
        .route("/search", get(search))
        .route("/refinements", post(post_refinement))
        .route("/indicators", get(list_indicators))
        .route("/indicators/{id}", get(get_indicator))
        .route("/report", get(report));
    Router::new().nest("/v1", v1).fallback(not_found).with_state(repo)
}

pub fn shared(repo: Repository) -> SharedRepo {
    Arc::new(RwLock::new(repo))
}

/// Serves until Ctrl-C.
pub async fn serve(repo: Repository, addr: SocketAddr, cors_origin: Option<&str>) -> anyhow::Result<()> {
    let app = router(shared(repo)).layer(cors(cors_origin).map_err(|e| anyhow::anyhow!(e.message))?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
