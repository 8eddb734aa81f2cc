//! HTTP/JSON facade over the reputation engine.
//!
//! Every handler is a thin adapter over one engine operation. All mutations
//! go through a single mutex-guarded [`Engine`], which is the knowledge
//! base's single writer. There is no authentication: `user_id` is trusted
//! input.
//!
//! | method | path                          | operation          |
//! |--------|-------------------------------|--------------------|
//! | POST   | `/users`                      | new user           |
//! | POST   | `/feedbacks`                  | store prefabricated feedback |
//! | POST   | `/reviews`                    | submit review      |
//! | GET    | `/sessions/{id}`              | session state      |
//! | POST   | `/sessions/{id}/votes`        | process vote       |
//! | POST   | `/sessions/{id}/finalize`     | finalize session   |
//! | GET    | `/products/{id}/score`        | product score      |
//! | GET    | `/products/{id}/feedbacks`    | stored feedbacks   |
//! | GET    | `/users/{id}/trust`           | trust and blacklist|

mod error;

use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use trustrep::{
    text, Choice, Engine, FeedbackCategory, FeedbackRecord, ReviewSession, SessionOutcome,
    SessionState, Timestamp, UserRecord, VoteOutcome,
};

pub use error::{ApiError, ErrorResponse};

/// Header carrying the caller's clock (UTC seconds) in test mode.
pub const NOW_HEADER: &str = "x-trustrep-now";

type ApiResult<T> = Result<T, ErrorResponse>;

#[derive(Clone)]
pub struct AppState {
    engine: Arc<Mutex<Engine>>,
    test_mode: bool,
}

impl AppState {
    pub fn new(engine: Engine, test_mode: bool) -> Self {
        Self {
            engine: Arc::new(Mutex::new(engine)),
            test_mode,
        }
    }

    pub fn engine(&self) -> MutexGuard<'_, Engine> {
        self.engine
            .lock()
            .unwrap_or_else(|poisoned| poisoned.into_inner())
    }

    fn now(&self, headers: &HeaderMap) -> ApiResult<Timestamp> {
        if self.test_mode {
            if let Some(value) = headers.get(NOW_HEADER) {
                return value
                    .to_str()
                    .ok()
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| {
                        ErrorResponse::new(
                            StatusCode::BAD_REQUEST,
                            "invalid_clock",
                            format!("{NOW_HEADER} must be integer UTC seconds"),
                        )
                    });
            }
        }
        Ok(SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs() as Timestamp)
            .unwrap_or_default())
    }
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ErrorResponse::new(StatusCode::BAD_REQUEST, "invalid_body", e.body_text()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateUser {
    pub user_id: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoreFeedback {
    pub feedback_id: String,
    pub product_id: String,
    pub author_id: String,
    pub text: String,
    pub appreciation: f64,
    pub trustworthiness: f64,
    /// Classified from the text when omitted.
    #[serde(default)]
    pub category: Option<FeedbackCategory>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitReview {
    pub user_id: String,
    pub product_id: String,
    pub appreciation: f64,
    pub text: String,
    #[serde(default)]
    pub k: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CastVote {
    pub user_id: String,
    pub feedback_id: String,
    pub choice: Choice,
}

#[derive(Debug, Deserialize)]
pub struct FeedbackQuery {
    pub category: Option<String>,
}

/// A served feedback as the reviewer sees it: no trustworthiness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServedFeedback {
    pub feedback_id: String,
    pub text: String,
    pub category: FeedbackCategory,
    pub created_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub user_id: String,
    pub product_id: String,
    pub state: SessionState,
    pub thin: bool,
    pub selection: Vec<ServedFeedback>,
    pub voted: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScoreValue {
    Rated(f64),
    Unrated(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreView {
    pub product_id: String,
    pub score: ScoreValue,
    pub rating_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustView {
    pub user_id: String,
    pub trust_degree: f64,
    pub blacklisted: bool,
    pub blacklist_until: Option<Timestamp>,
    pub retry_after_seconds: Option<i64>,
}

fn session_view(engine: &Engine, session: &ReviewSession) -> SessionView {
    let store = engine.store();
    SessionView {
        session_id: session.session_id.clone(),
        user_id: session.user_id.clone(),
        product_id: session.product_id.clone(),
        state: session.state,
        thin: session.thin,
        selection: session
            .selection
            .iter()
            .filter_map(|id| store.feedbacks.get(id))
            .map(|f| ServedFeedback {
                feedback_id: f.feedback_id.clone(),
                text: f.text.clone(),
                category: f.category,
                created_at: f.created_at,
            })
            .collect(),
        voted: session
            .votes
            .iter()
            .map(|v| v.feedback_id.clone())
            .collect(),
    }
}

async fn create_user(
    State(state): State<AppState>,
    headers: HeaderMap,
    payload: Result<Json<CreateUser>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<UserRecord>)> {
    let req = body(payload)?;
    let now = state.now(&headers)?;
    let user = state.engine().new_user(&req.user_id, now)?;
    Ok((StatusCode::CREATED, Json(user)))
}

async fn store_feedback(
    State(state): State<AppState>,
    headers: HeaderMap,
    payload: Result<Json<StoreFeedback>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<FeedbackRecord>)> {
    let req = body(payload)?;
    let now = state.now(&headers)?;
    let mut engine = state.engine();
    let category = match req.category {
        Some(c) => c,
        None => text::classify_feedback(&req.text, engine.lexicon())
            .map_err(trustrep::EngineError::from)?,
    };
    let record = FeedbackRecord {
        feedback_id: req.feedback_id,
        product_id: req.product_id,
        author_id: req.author_id,
        text: req.text,
        category,
        trustworthiness: req.trustworthiness,
        created_at: now,
        appreciation: req.appreciation,
    };
    engine.store_feedback(record.clone())?;
    Ok((StatusCode::CREATED, Json(record)))
}

async fn submit_review(
    State(state): State<AppState>,
    headers: HeaderMap,
    payload: Result<Json<SubmitReview>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let req = body(payload)?;
    let now = state.now(&headers)?;
    let mut engine = state.engine();
    let session = engine.submit_review(
        &req.user_id,
        &req.product_id,
        req.appreciation,
        &req.text,
        req.k,
        now,
    )?;
    if session.state == SessionState::Rejected {
        let ttl = engine.config().blacklist_ttl;
        return Err(ErrorResponse::new(
            StatusCode::CONFLICT,
            "discordant",
            format!(
                "appreciation and text disagree; session {} rejected and user blacklisted",
                session.session_id
            ),
        )
        .retry_after(ttl));
    }
    Ok((StatusCode::CREATED, Json(session_view(&engine, &session))))
}

async fn get_session(
    State(state): State<AppState>,
    Path(session_id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    let engine = state.engine();
    let session = engine.store().session(&session_id)?;
    Ok(Json(session_view(&engine, session)))
}

async fn cast_vote(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(session_id): Path<String>,
    payload: Result<Json<CastVote>, JsonRejection>,
) -> ApiResult<Json<VoteOutcome>> {
    let req = body(payload)?;
    let now = state.now(&headers)?;
    let outcome = state.engine().process_vote(
        &session_id,
        &req.user_id,
        &req.feedback_id,
        req.choice,
        now,
    )?;
    Ok(Json(outcome))
}

async fn finalize(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(session_id): Path<String>,
) -> ApiResult<Json<SessionOutcome>> {
    let now = state.now(&headers)?;
    let outcome = state.engine().finalize_session(&session_id, now)?;
    Ok(Json(outcome))
}

async fn product_score(
    State(state): State<AppState>,
    Path(product_id): Path<String>,
) -> Json<ScoreView> {
    let agg = state.engine().store().aggregate(&product_id);
    Json(ScoreView {
        score: match agg.score() {
            Some(s) => ScoreValue::Rated(s),
            None => ScoreValue::Unrated("unrated".into()),
        },
        rating_count: agg.rating_count,
        product_id,
    })
}

async fn product_feedbacks(
    State(state): State<AppState>,
    Path(product_id): Path<String>,
    Query(query): Query<FeedbackQuery>,
) -> ApiResult<Json<Vec<FeedbackRecord>>> {
    let category = query
        .category
        .as_deref()
        .map(str::parse::<FeedbackCategory>)
        .transpose()
        .map_err(|e| {
            ErrorResponse::new(StatusCode::BAD_REQUEST, "invalid_category", e.to_string())
        })?;
    let engine = state.engine();
    Ok(Json(
        engine
            .store()
            .feedbacks_for_product(&product_id, category)
            .into_iter()
            .cloned()
            .collect(),
    ))
}

async fn user_trust(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(user_id): Path<String>,
) -> ApiResult<Json<TrustView>> {
    let now = state.now(&headers)?;
    let engine = state.engine();
    let user = engine.store().user(&user_id)?;
    Ok(Json(TrustView {
        user_id: user.user_id.clone(),
        trust_degree: user.trust_degree,
        blacklisted: user.is_blacklisted(now),
        blacklist_until: user.blacklist_until,
        retry_after_seconds: user.blacklist_remaining(now),
    }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/users", post(create_user))
        .route("/users/{id}/trust", get(user_trust))
        .route("/feedbacks", post(store_feedback))
        .route("/reviews", post(submit_review))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/votes", post(cast_vote))
        .route("/sessions/{id}/finalize", post(finalize))
        .route("/products/{id}/score", get(product_score))
        .route("/products/{id}/feedbacks", get(product_feedbacks))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    tracing::info!(addr = ?listener.local_addr().ok(), "listening");
    axum::serve(listener, router(state)).await
}
