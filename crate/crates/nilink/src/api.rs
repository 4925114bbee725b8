//! HTTP API over a [`SessionStore`].
//!
//! | method | path | body / reply |
//! |--------|------|--------------|
//! | GET | `/api/session/{id}/next?annotator=A` | [`NextView`] |
//! | POST | `/api/session/{id}/annotation` | [`AnnotationBody`] → [`ConsensusView`] |
//! | GET | `/api/session/{id}/disputes` | list of [`DisputeView`] |
//! | POST | `/api/session/{id}/adjudication` | [`AdjudicationBody`] → [`ConsensusView`] |
//! | GET | `/api/session/{id}/progress` | [`ProgressView`] |
//! | GET | `/api/session/{id}/agreement` | [`AgreementView`] |
//! | GET | `/api/session/{id}/export` | entry file (JSON lines) |
//!
//! Errors reply with [`ErrorView`]: 404 for unknown sessions or entries,
//! 403 for ids outside the session, 422 for invalid choices, 409 for
//! requests the session state does not allow.

use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use nilink_core::annotate::{Event, Session};
use serde::Deserialize;

use crate::error::Error;
use crate::formats::entries_to_string;
use crate::store::SessionStore;
use crate::wire::*;

pub type SharedStore = Arc<Mutex<SessionStore>>;

pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(ErrorView { error: self.1 })).into_response()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        use nilink_core::Error as C;
        let status = match &e {
            Error::Core(c) => match c {
                C::UnknownAnnotator(_) | C::NotExpert(_) => StatusCode::FORBIDDEN,
                C::UnknownEntry(_) => StatusCode::NOT_FOUND,
                C::InvalidChoice { .. } | C::MissingNilPattern(_) => {
                    StatusCode::UNPROCESSABLE_ENTITY
                }
                C::NotDisputed { .. } | C::AlreadyAdjudicated(_) | C::IncompleteSession { .. } => {
                    StatusCode::CONFLICT
                }
                _ => StatusCode::BAD_REQUEST,
            },
            Error::Invalid(_) | Error::Format { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            Error::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

impl From<nilink_core::Error> for ApiError {
    fn from(e: nilink_core::Error) -> Self {
        Error::from(e).into()
    }
}

fn unknown_session(id: &str) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, format!("unknown session {id}"))
}

fn invalid(msg: String) -> ApiError {
    ApiError(StatusCode::UNPROCESSABLE_ENTITY, msg)
}

fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn with_session<T>(
    store: &SharedStore,
    id: &str,
    f: impl FnOnce(&Session) -> Result<T, ApiError>,
) -> Result<T, ApiError> {
    let guard = store.lock().expect("store lock poisoned");
    let session = guard.get(id).ok_or_else(|| unknown_session(id))?;
    f(session)
}

fn commit(store: &SharedStore, id: &str, event: Event) -> Result<Json<ConsensusView>, ApiError> {
    let mut guard = store.lock().expect("store lock poisoned");
    let state = guard
        .commit(id, event)
        .ok_or_else(|| unknown_session(id))??;
    Ok(Json(ConsensusView::from(&state)))
}

#[derive(Deserialize)]
struct NextQuery {
    annotator: String,
}

async fn next(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
    Query(q): Query<NextQuery>,
) -> Result<Json<NextView>, ApiError> {
    with_session(&store, &id, |s| {
        let task = s.next_task(&q.annotator)?;
        Ok(Json(NextView {
            done: task.is_none(),
            task: task.as_ref().map(TaskView::from),
        }))
    })
}

async fn annotation(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
    Json(body): Json<AnnotationBody>,
) -> Result<Json<ConsensusView>, ApiError> {
    let record = body.into_record(now_millis()).map_err(invalid)?;
    commit(&store, &id, Event::Annotation(record))
}

async fn adjudication(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
    Json(body): Json<AdjudicationBody>,
) -> Result<Json<ConsensusView>, ApiError> {
    let decision = body.into_decision(now_millis()).map_err(invalid)?;
    commit(&store, &id, Event::Adjudication(decision))
}

async fn disputes(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
) -> Result<Json<Vec<DisputeView>>, ApiError> {
    with_session(&store, &id, |s| {
        s.disputes()
            .iter()
            .map(|d| Ok(DisputeView::new(d, &s.task(d.entry_id)?)))
            .collect::<Result<Vec<_>, ApiError>>()
            .map(Json)
    })
}

async fn progress(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
) -> Result<Json<ProgressView>, ApiError> {
    with_session(&store, &id, |s| Ok(Json(s.progress().into())))
}

async fn agreement(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
) -> Result<Json<AgreementView>, ApiError> {
    with_session(&store, &id, |s| {
        Ok(Json(AgreementView {
            agreement_rate: s.agreement_rate()?,
            entries: s.entries().count(),
        }))
    })
}

async fn export(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    with_session(&store, &id, |s| {
        let body = entries_to_string(&s.export());
        Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
    })
}

pub fn router(store: SharedStore) -> Router {
    Router::new()
        .route("/api/session/{id}/next", get(next))
        .route("/api/session/{id}/annotation", post(annotation))
        .route("/api/session/{id}/disputes", get(disputes))
        .route("/api/session/{id}/adjudication", post(adjudication))
        .route("/api/session/{id}/progress", get(progress))
        .route("/api/session/{id}/agreement", get(agreement))
        .route("/api/session/{id}/export", get(export))
        .with_state(store)
}

/// API routes plus, when given, static UI assets at `/`.
pub fn app(store: SharedStore, static_dir: Option<PathBuf>) -> Router {
    let api = router(store);
    match static_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}
