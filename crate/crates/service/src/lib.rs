//! HTTP/JSON facade over a conversation corpus.
//!
//! The service mirrors the register → upload → view-metrics workflow:
//!
//! | Method | Path                          | Success                          |
//! |--------|-------------------------------|----------------------------------|
//! | POST   | /meetings                     | 201 `{"meeting_id": ...}`        |
//! | PUT    | /meetings/{id}/transcript     | 200 ingestion warnings document  |
//! | GET    | /meetings/{id}/metrics        | 200 meeting report (CLI schema)  |
//! | GET    | /students/{id}/trend          | 200 student trend document       |
//! | GET    | /cohort/summary               | 200 cohort aggregates document   |
//! | GET    | /healthz                      | 200 `{"status":"ok", ...}`       |
//!
//! Every non-2xx response carries a JSON body `{"code","message","status"}`
//! where `code` is one of `unknown_meeting`, `unknown_student`,
//! `parse_failure`, `conflict`, or `internal`. GET handlers never write
//! (metric caching aside), and repeated GETs without intervening writes
//! return byte-identical bodies. Metric bodies are byte-identical to the
//! JSON the `analyze` subcommand prints for the same meeting and config.

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use chrono::NaiveDate;
use serde::Deserialize;

use convo_core::config::AnalysisConfig;
use convo_core::trend::{student_trend, TrendError};
use convo_core::volatility::Segment;
use convo_report::canon::json_string;
use convo_report::{emit_cohort_json, emit_trend_json, emit_warnings_json, SCHEMA_VERSION};
use convo_store::{CorpusStore, RegisterOptions, StoreError};

/// Hard ceiling on transcript upload size. A one-hour meeting transcript is
/// well under 1 MiB, so anything over this is a client mistake.
pub const TRANSCRIPT_BYTE_CAP: usize = 10 * 1024 * 1024;

/// A structured failure: HTTP status plus a machine-readable code.
#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    /// One of: unknown_meeting, unknown_student, parse_failure, conflict,
    /// internal.
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError { status, code, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    fn parse_failure(status: StatusCode, message: impl Into<String>) -> ApiError {
        ApiError::new(status, "parse_failure", message)
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> ApiError {
        match &e {
            StoreError::UnknownMeeting(id) => ApiError::new(
                StatusCode::NOT_FOUND,
                "unknown_meeting",
                format!("unknown meeting: {id}"),
            ),
            StoreError::Transcript(inner) => ApiError::parse_failure(
                StatusCode::UNPROCESSABLE_ENTITY,
                format!("{}: {inner}", inner.kind()),
            ),
            StoreError::UnknownSpeakers(names) => ApiError::new(
                StatusCode::CONFLICT,
                "conflict",
                format!(
                    "transcript names speakers the alias policy rejects: {}",
                    names.join(", ")
                ),
            ),
            _ => ApiError::internal(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = format!(
            "{{\"code\":{},\"message\":{},\"status\":{}}}\n",
            json_string(self.code),
            json_string(&self.message),
            self.status.as_u16(),
        );
        json_response(self.status, body)
    }
}

/// Wrap a JSON document in a response, guaranteeing exactly one trailing
/// newline so bodies match the CLI's stdout byte for byte.
fn json_response(status: StatusCode, text: String) -> Response {
    let body = if text.ends_with('\n') { text } else { format!("{text}\n") };
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

struct AppState {
    root: PathBuf,
}

type Shared = Arc<AppState>;

/// Build the service router for the corpus at `root`.
pub fn router(root: PathBuf) -> Router {
    let state: Shared = Arc::new(AppState { root });
    Router::new()
        .route("/meetings", post(post_meeting))
        .route("/meetings/{id}/transcript", put(put_transcript))
        .route("/meetings/{id}/metrics", get(get_metrics))
        .route("/students/{id}/trend", get(get_trend))
        .route("/cohort/summary", get(get_cohort))
        .route("/healthz", get(get_health))
        .fallback(unknown_route)
        .method_not_allowed_fallback(method_not_allowed)
        .with_state(state)
}

/// Run a synchronous store operation off the async workers.
async fn blocking<T, F>(task: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
{
    tokio::task::spawn_blocking(task)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

fn open_store(root: &std::path::Path) -> Result<CorpusStore, ApiError> {
    CorpusStore::open(root).map_err(ApiError::from)
}

fn effective_config(store: &CorpusStore) -> Result<AnalysisConfig, ApiError> {
    store.config().map_err(ApiError::from)
}

fn parse_segment(raw: &Option<String>) -> Result<Segment, ApiError> {
    match raw {
        None => Ok(Segment::Whole),
        Some(s) => Segment::from_str(s)
            .map_err(|m| ApiError::parse_failure(StatusCode::UNPROCESSABLE_ENTITY, m)),
    }
}

async fn get_health() -> Response {
    json_response(
        StatusCode::OK,
        format!("{{\"schema_version\":{SCHEMA_VERSION},\"status\":\"ok\"}}"),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegisterBody {
    date: NaiveDate,
    #[serde(default)]
    course: Option<String>,
}

async fn post_meeting(State(app): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let parsed: RegisterBody = serde_json::from_slice(&body).map_err(|e| {
        ApiError::parse_failure(
            StatusCode::UNPROCESSABLE_ENTITY,
            format!("bad registration body: {e}"),
        )
    })?;
    let root = app.root.clone();
    let id = blocking(move || {
        let store = open_store(&root)?;
        let options = RegisterOptions {
            course_tag: parsed.course.unwrap_or_default(),
            ..RegisterOptions::default()
        };
        store.register_meeting(parsed.date, &options).map_err(ApiError::from)
    })
    .await?;
    Ok(json_response(
        StatusCode::CREATED,
        format!("{{\"meeting_id\":{}}}", json_string(&id)),
    ))
}

async fn put_transcript(
    State(app): State<Shared>,
    Path(id): Path<String>,
    request: axum::extract::Request,
) -> Result<Response, ApiError> {
    let bytes = axum::body::to_bytes(request.into_body(), TRANSCRIPT_BYTE_CAP)
        .await
        .map_err(|_| {
            ApiError::parse_failure(StatusCode::PAYLOAD_TOO_LARGE, "body exceeds 10 MiB cap")
        })?;
    let text = String::from_utf8(bytes.to_vec()).map_err(|_| {
        ApiError::parse_failure(
            StatusCode::UNPROCESSABLE_ENTITY,
            "transcript must be UTF-8 text",
        )
    })?;
    let root = app.root.clone();
    let report = blocking(move || {
        let store = open_store(&root)?;
        store.attach_transcript(&id, &text).map_err(ApiError::from)
    })
    .await?;
    Ok(json_response(StatusCode::OK, emit_warnings_json(&report)))
}

async fn get_metrics(
    State(app): State<Shared>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let root = app.root.clone();
    let text = blocking(move || {
        let store = open_store(&root)?;
        let config = effective_config(&store)?;
        store.meeting_report_json(&id, &config).map_err(ApiError::from)
    })
    .await?;
    Ok(json_response(StatusCode::OK, text))
}

#[derive(Deserialize)]
struct SegmentQuery {
    segment: Option<String>,
}

async fn get_trend(
    State(app): State<Shared>,
    Path(id): Path<String>,
    Query(query): Query<SegmentQuery>,
) -> Result<Response, ApiError> {
    let segment = parse_segment(&query.segment)?;
    let root = app.root.clone();
    let text = blocking(move || {
        let store = open_store(&root)?;
        let config = effective_config(&store)?;
        let (snapshot, failures) = store.load_corpus(&config).map_err(ApiError::from)?;
        log_failures(&failures);
        let trend = student_trend(&snapshot, &id, segment).map_err(|e| match e {
            TrendError::UnknownStudent(s) => ApiError::new(
                StatusCode::NOT_FOUND,
                "unknown_student",
                format!("unknown student: {s}"),
            ),
            other => ApiError::internal(other.to_string()),
        })?;
        Ok(emit_trend_json(&trend, &config.fingerprint()))
    })
    .await?;
    Ok(json_response(StatusCode::OK, text))
}

async fn get_cohort(
    State(app): State<Shared>,
    Query(query): Query<SegmentQuery>,
) -> Result<Response, ApiError> {
    let segment = parse_segment(&query.segment)?;
    let root = app.root.clone();
    let text = blocking(move || {
        let store = open_store(&root)?;
        let config = effective_config(&store)?;
        let (snapshot, failures) = store.load_corpus(&config).map_err(ApiError::from)?;
        log_failures(&failures);
        Ok(emit_cohort_json(&snapshot, segment))
    })
    .await?;
    Ok(json_response(StatusCode::OK, text))
}

async fn unknown_route() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "internal", "no such endpoint")
}

async fn method_not_allowed() -> ApiError {
    ApiError::new(
        StatusCode::METHOD_NOT_ALLOWED,
        "internal",
        "method not allowed on this endpoint",
    )
}

fn log_failures(failures: &[convo_store::MeetingFailure]) {
    for f in failures {
        eprintln!("warning: skipping meeting {}: {}", f.meeting_id, f.error);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn api_error_body_is_canonical_json() {
        let e = ApiError::new(StatusCode::NOT_FOUND, "unknown_meeting", "unknown meeting: x");
        let body = format!(
            "{{\"code\":{},\"message\":{},\"status\":{}}}\n",
            json_string(e.code),
            json_string(&e.message),
            e.status.as_u16()
        );
        assert_eq!(
            body,
            "{\"code\":\"unknown_meeting\",\"message\":\"unknown meeting: x\",\"status\":404}\n"
        );
    }

    #[test]
    fn store_errors_map_to_the_fixed_code_set() {
        let cases = [
            (StoreError::UnknownMeeting("x".into()), "unknown_meeting", 404),
            (StoreError::UnknownSpeakers(vec!["A".into()]), "conflict", 409),
            (StoreError::Invalid("bad".into()), "internal", 500),
        ];
        for (err, code, status) in cases {
            let api = ApiError::from(err);
            assert_eq!(api.code, code);
            assert_eq!(api.status.as_u16(), status);
        }
    }

    #[test]
    fn segment_parse_defaults_to_whole() {
        assert_eq!(parse_segment(&None).unwrap(), Segment::Whole);
        assert_eq!(parse_segment(&Some("h2".into())).unwrap(), Segment::SecondHalf);
        assert!(parse_segment(&Some("banana".into())).is_err());
    }
}
