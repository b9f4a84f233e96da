//! Stateless JSON-over-HTTP wrapper of the coilfield engine under `/api/v1`.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use coilfield::electrical::electrical_report;
use coilfield::field::FieldError;
use coilfield::homogeneity::{analyze, HomogeneityError};
use coilfield::persistence::{
    load_project, load_results, save_results, HomogeneitySettings, PersistError, ProjectDocument, ResultsDocument,
};
use coilfield::{default_region, make_preset, simulate_grid, FieldGrid, Preset};

/// Largest lattice served synchronously, in samples.
pub const MAX_SYNC_SAMPLES: usize = 251 * 251;

// a 251 × 251 results document is about 5 MB
const BODY_LIMIT: usize = 64 * 1024 * 1024;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    Validation,
    Numeric,
    NotFound,
    OverCapacity,
}

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_path: Option<String>,
    #[serde(skip)]
    status: u16,
}

impl ApiError {
    fn new(status: StatusCode, code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            field_path: None,
            status: status.as_u16(),
        }
    }

    fn at(mut self, path: Option<String>) -> Self {
        self.field_path = path;
        self
    }

    fn validation(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, ErrorCode::Validation, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

impl From<PersistError> for ApiError {
    fn from(e: PersistError) -> Self {
        let path = e.field_path();
        Self::validation(e.to_string()).at(path)
    }
}

impl From<HomogeneityError> for ApiError {
    fn from(e: HomogeneityError) -> Self {
        match e {
            HomogeneityError::Threshold(_) => Self::validation(e.to_string()).at(Some("threshold_percent".into())),
            HomogeneityError::ZeroReference(_) | HomogeneityError::EmptySquare => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::Numeric, e.to_string())
            }
        }
    }
}

impl From<FieldError> for ApiError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::InvalidSystem(_) | FieldError::InvalidRegion(_) => Self::validation(e.to_string()),
            _ => Self::new(StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::Numeric, e.to_string()),
        }
    }
}

/// Shared only for the readiness flag; requests never mutate it.
#[derive(Debug, Clone, Default)]
pub struct AppState {
    ready: Arc<AtomicBool>,
}

impl AppState {
    pub fn new(ready: bool) -> Self {
        Self {
            ready: Arc::new(AtomicBool::new(ready)),
        }
    }

    pub fn set_ready(&self, ready: bool) {
        self.ready.store(ready, Ordering::Release);
    }

    pub fn is_ready(&self) -> bool {
        self.ready.load(Ordering::Acquire)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/presets", get(presets))
        .route("/api/v1/simulate", post(simulate))
        .route("/api/v1/homogeneity", post(homogeneity))
        .fallback(not_found)
        .method_not_allowed_fallback(method_not_allowed)
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub version: String,
}

async fn health(State(state): State<AppState>) -> Response {
    let (status, word) = if state.is_ready() {
        (StatusCode::OK, "ok")
    } else {
        (StatusCode::SERVICE_UNAVAILABLE, "starting")
    };
    let body = Health {
        status: word.into(),
        version: VERSION.into(),
    };
    (status, Json(body)).into_response()
}

/// Catalog entry: a preset at base radius 0.5 m, 100 turns, 1 A, laid out
/// over its default region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetEntry {
    pub name: String,
    pub description: String,
    pub template: ProjectDocument,
}

pub fn preset_catalog() -> Vec<PresetEntry> {
    Preset::ALL
        .iter()
        .map(|p| {
            let system = make_preset(p.name(), 0.5, 100, 1.0).expect("catalog parameters are valid");
            PresetEntry {
                name: p.name().into(),
                description: p.description().into(),
                template: ProjectDocument::new(&system, &default_region(&system), HomogeneitySettings::default()),
            }
        })
        .collect()
}

async fn presets() -> Json<Vec<PresetEntry>> {
    Json(preset_catalog())
}

fn check_capacity(doc: &ProjectDocument) -> Result<(), ApiError> {
    let samples = doc.region.ny.saturating_mul(doc.region.nz);
    if samples > MAX_SYNC_SAMPLES {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            ErrorCode::OverCapacity,
            format!(
                "grid of {} x {} samples exceeds the synchronous limit of 251 x 251",
                doc.region.ny, doc.region.nz
            ),
        )
        .at(Some("region.ny".into())));
    }
    Ok(())
}

fn run_simulation(doc: ProjectDocument) -> Result<ResultsDocument, ApiError> {
    let system = doc.system();
    let grid = simulate_grid(&system, &doc.region(), &|_| {})?;
    let electrical = electrical_report(&system)
        .map_err(|e| log::warn!("electrical report omitted: {e}"))
        .ok();
    Ok(ResultsDocument {
        project: doc,
        grid,
        electrical,
        homogeneity: None,
    })
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            ErrorCode::Numeric,
            format!("worker failed: {e}"),
        )
    })?
}

fn json_bytes(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

async fn simulate(body: Bytes) -> Result<Response, ApiError> {
    let doc = load_project(&body)?;
    check_capacity(&doc)?;
    let results = blocking(move || run_simulation(doc)).await?;
    Ok(json_bytes(save_results(&results)))
}

/// Either an inline results document or a project to simulate first.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogeneityRequest {
    pub threshold_percent: f64,
    #[serde(default)]
    pub signed_convention: bool,
    #[serde(default)]
    pub results: Option<serde_json::Value>,
    #[serde(default)]
    pub project: Option<serde_json::Value>,
}

fn nested<T>(result: Result<T, PersistError>, prefix: &str) -> Result<T, ApiError> {
    result.map_err(|e| {
        let path = e
            .field_path()
            .map(|p| format!("{prefix}.{p}"))
            .or(Some(prefix.to_string()));
        ApiError::validation(e.to_string()).at(path)
    })
}

fn grid_for(request: HomogeneityRequest) -> Result<FieldGrid, ApiError> {
    match (request.results, request.project) {
        (Some(results), None) => {
            let bytes = serde_json::to_vec(&results).expect("JSON values always serialize");
            Ok(nested(load_results(&bytes), "results")?.grid)
        }
        (None, Some(project)) => {
            let bytes = serde_json::to_vec(&project).expect("JSON values always serialize");
            let doc = nested(load_project(&bytes), "project")?;
            check_capacity(&doc)?;
            Ok(run_simulation(doc)?.grid)
        }
        _ => Err(ApiError::validation("supply exactly one of 'results' or 'project'").at(Some("results".into()))),
    }
}

async fn homogeneity(body: Bytes) -> Result<Response, ApiError> {
    let mut de = serde_json::Deserializer::from_slice(&body);
    let request: HomogeneityRequest = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        ApiError::validation(e.into_inner().to_string()).at((path != ".").then_some(path))
    })?;
    let threshold = request.threshold_percent;
    if !(threshold > 0.0 && threshold <= 100.0) {
        return Err(HomogeneityError::Threshold(threshold).into());
    }
    let convention = HomogeneitySettings {
        threshold_percent: threshold,
        signed_convention: request.signed_convention,
    }
    .convention();
    let report = blocking(move || {
        let grid = grid_for(request)?;
        Ok(analyze(&grid, threshold, convention)?.2)
    })
    .await?;
    Ok(Json(report).into_response())
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, ErrorCode::NotFound, "no such endpoint")
}

async fn method_not_allowed() -> ApiError {
    ApiError::new(
        StatusCode::METHOD_NOT_ALLOWED,
        ErrorCode::NotFound,
        "method not allowed on this endpoint",
    )
}
