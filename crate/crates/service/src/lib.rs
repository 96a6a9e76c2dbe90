//! HTTP survey service for collecting live conjoint choices.
//!
//! Endpoints (JSON unless noted):
//!
//! | method | path | body |
//! |---|---|---|
//! | GET | `/design` | design summary |
//! | GET | `/task?respondent=ID` | next task, or `{"status":"complete"}` |
//! | POST | `/choice` | `{respondent, taskId, chosenIndex}` → ack |
//! | GET | `/results` | tally, importances, fit, sample-size check |
//! | GET | `/export/choices` | the choice log (CSV) |
//!
//! Choices are appended to a CSV log and synced to disk before they are
//! acknowledged. On start the log is replayed to rebuild every session.

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use trustcbc::conjoint::{DesignSummary, FitConfig};
use trustcbc::ingest::read_design;

mod results;
mod survey;

pub use results::{compute_results, ResultsReport, SurveyResults};
pub use survey::{
    task_order, ChoiceAck, ConceptView, LevelView, NextTask, SubmitError, Survey, SurveySession,
};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid design: {0}")]
    Design(String),
    #[error("invalid choice log: {0}")]
    Log(String),
}

/// Where to listen and which files to use. Without a design the service
/// starts but answers every request with 503.
#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub design: Option<PathBuf>,
    pub log: PathBuf,
}

/// Shared handler state.
#[derive(Clone, Default)]
pub struct AppState {
    survey: Option<Arc<Mutex<Survey>>>,
    fit: FitConfig,
}

impl AppState {
    pub fn unconfigured() -> Self {
        Self::default()
    }

    pub fn new(survey: Survey) -> Self {
        Self {
            survey: Some(Arc::new(Mutex::new(survey))),
            fit: FitConfig::default(),
        }
    }

    /// Reads the design and replays the log named in `config`.
    pub fn from_config(config: &ServiceConfig) -> Result<Self, ServiceError> {
        let Some(path) = &config.design else {
            return Ok(Self::unconfigured());
        };
        let file = std::fs::File::open(path)
            .map_err(|e| ServiceError::Design(format!("{}: {e}", path.display())))?;
        let design = read_design(file).map_err(|e| ServiceError::Design(e.to_string()))?;
        Ok(Self::new(Survey::open(design, &config.log)?))
    }

    fn survey(&self) -> Result<Arc<Mutex<Survey>>, ApiError> {
        self.survey.clone().ok_or_else(|| {
            ApiError::new(
                StatusCode::SERVICE_UNAVAILABLE,
                "not_ready",
                "no design is configured",
            )
        })
    }
}

fn lock(survey: &Mutex<Survey>) -> MutexGuard<'_, Survey> {
    // a panic while holding the lock cannot leave a half-written session:
    // the session only advances after the log append succeeds
    survey.lock().unwrap_or_else(|p| p.into_inner())
}

#[derive(Debug, Serialize)]
struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    error: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, error: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            error,
            message: message.into(),
        }
    }

    fn internal(message: impl ToString) -> Self {
        Self::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            message.to_string(),
        )
    }
}

impl From<SubmitError> for ApiError {
    fn from(e: SubmitError) -> Self {
        let message = e.to_string();
        match e {
            SubmitError::Duplicate { .. } => Self::new(StatusCode::CONFLICT, "duplicate", message),
            SubmitError::OutOfOrder { .. } => Self::new(StatusCode::CONFLICT, "sequence", message),
            SubmitError::Invalid(_) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "validation", message)
            }
            SubmitError::Io(_) => Self::internal(message),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

#[derive(Debug, Deserialize)]
struct TaskQuery {
    respondent: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChoiceRequest {
    pub respondent: String,
    pub task_id: u32,
    pub chosen_index: usize,
}

async fn get_design(State(state): State<AppState>) -> Result<Json<DesignSummary>, ApiError> {
    let survey = state.survey()?;
    let summary = lock(&survey).design().summary();
    Ok(Json(summary))
}

async fn get_task(
    State(state): State<AppState>,
    Query(q): Query<TaskQuery>,
) -> Result<Json<NextTask>, ApiError> {
    let survey = state.survey()?;
    let task = lock(&survey).next_task(&q.respondent)?;
    Ok(Json(task))
}

async fn post_choice(
    State(state): State<AppState>,
    Json(req): Json<ChoiceRequest>,
) -> Result<Json<ChoiceAck>, ApiError> {
    let survey = state.survey()?;
    // the append blocks on fsync
    let ack = tokio::task::spawn_blocking(move || {
        lock(&survey).submit(&req.respondent, req.task_id, req.chosen_index)
    })
    .await
    .map_err(ApiError::internal)??;
    Ok(Json(ack))
}

async fn get_results(State(state): State<AppState>) -> Result<Json<SurveyResults>, ApiError> {
    let survey = state.survey()?;
    let (design, choices) = {
        let s = lock(&survey);
        (s.design().clone(), s.choices().to_vec())
    };
    let fit = state.fit;
    let results = tokio::task::spawn_blocking(move || compute_results(&design, &choices, &fit))
        .await
        .map_err(ApiError::internal)?
        .map_err(ApiError::internal)?;
    Ok(Json(results))
}

async fn export_choices(State(state): State<AppState>) -> Result<Response, ApiError> {
    let survey = state.survey()?;
    let bytes = tokio::task::spawn_blocking(move || lock(&survey).export())
        .await
        .map_err(ApiError::internal)?
        .map_err(ApiError::internal)?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], bytes).into_response())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/design", get(get_design))
        .route("/task", get(get_task))
        .route("/choice", post(post_choice))
        .route("/results", get(get_results))
        .route("/export/choices", get(export_choices))
        .with_state(state)
}

/// Binds, prints `listening on http://ADDR` to stdout, and serves until
/// `shutdown` resolves.
pub async fn run(
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    let state = AppState::from_config(&config)?;
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    let addr = listener.local_addr()?;
    println!("listening on http://{addr}");
    tracing::info!(%addr, log = %config.log.display(), "survey service started");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}
