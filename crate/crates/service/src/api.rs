//! HTTP/JSON routes under `/api/v1`. Every handler is a thin adapter: parse,
//! issue one command under the session guard, return the projected state.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{FromRequest, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use criteria_core::engine::RecordedSession;
use criteria_core::export::{CriteriaExport, ExportFormat};
use criteria_core::history::{self, SessionEvent};
use criteria_core::session::{
    CriterionId, DecisionSession, DefinitionId, OptionId, OptionStatus, ProviderKind, SessionCommand,
    SessionConfig, SessionId, Tier,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::state::{AppState, GenerationStatus, Slot};

/// `axum::Json` with rejections mapped to our 422 body.
#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
pub struct Json<T>(pub T);

impl<T: Serialize> IntoResponse for Json<T> {
    fn into_response(self) -> Response {
        axum::Json(self.0).into_response()
    }
}

/// Like [`Json`] but an empty body means `T::default()`.
fn optional_body<T: DeserializeOwned + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::MalformedBody(e.to_string()))
}

pub fn router(state: Arc<AppState>) -> Router {
    let sessions = Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/framing", post(submit_framing))
        .route("/sessions/{id}/options", post(add_option))
        .route("/sessions/{id}/options/{oid}/status", post(toggle_option))
        .route("/sessions/{id}/narrowing/confirm", post(confirm_narrowing))
        .route("/sessions/{id}/criteria", post(add_criterion))
        .route("/sessions/{id}/criteria/{cid}/tier", post(set_tier))
        .route("/sessions/{id}/criteria/{cid}/remove", post(remove_criterion))
        .route("/sessions/{id}/criteria/{cid}/definitions", post(select_definitions))
        .route("/sessions/{id}/prioritization/confirm", post(confirm_prioritization))
        .route("/sessions/{id}/redefinition/confirm", post(confirm_redefinition))
        .route("/sessions/{id}/events", get(events))
        .route("/sessions/{id}/summary", get(summary))
        .route("/sessions/{id}/branch", post(branch))
        .route("/sessions/{id}/export", get(export))
        .route("/sessions/{id}/generation/retry", post(retry_generation));
    Router::new().nest("/api/v1", sessions).with_state(state)
}

/// The projected state a client renders: the session itself plus derived
/// conveniences and the background generation status.
#[derive(Debug, Serialize)]
pub struct SessionView<'a> {
    #[serde(flatten)]
    pub session: &'a DecisionSession,
    pub kept_count: u32,
    pub awaiting: bool,
    pub generation: &'a GenerationStatus,
}

impl<'a> SessionView<'a> {
    pub fn of(slot: &'a Slot) -> Self {
        let session = slot.recorded.session();
        SessionView {
            session,
            kept_count: session.kept_count(),
            awaiting: session.phase.kind.is_awaiting(),
            generation: &slot.generation,
        }
    }
}

fn view(slot: &Slot) -> Response {
    axum::Json(SessionView::of(slot)).into_response()
}

type ApiResult = Result<Response, ApiError>;

/// Every config field is optional; missing ones take the server defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigOverrides {
    options_per_round: Option<u32>,
    keep_target: Option<u32>,
    max_inferred_criteria: Option<u32>,
    definitions_per_criterion: Option<u32>,
    provider: Option<ProviderKind>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    #[serde(default)]
    config: ConfigOverrides,
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let CreateBody { config: o } = optional_body(&body)?;
    let d = state.default_config();
    let config = SessionConfig {
        options_per_round: o.options_per_round.unwrap_or(d.options_per_round),
        keep_target: o.keep_target.unwrap_or(d.keep_target),
        max_inferred_criteria: o.max_inferred_criteria.unwrap_or(d.max_inferred_criteria),
        definitions_per_criterion: o.definitions_per_criterion.unwrap_or(d.definitions_per_criterion),
        provider: o.provider.unwrap_or(d.provider),
        seed: o.seed.unwrap_or(d.seed),
    };
    let recorded = RecordedSession::create(SessionId::random(), config)?;
    let slot = state.insert(recorded)?;
    let slot = slot.lock().await;
    Ok((StatusCode::CREATED, axum::Json(SessionView::of(&slot))).into_response())
}

async fn list_sessions(State(state): State<Arc<AppState>>) -> ApiResult {
    let ids = state.store().list()?;
    Ok(axum::Json(serde_json::json!({ "sessions": ids })).into_response())
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<SessionId>) -> ApiResult {
    Ok(view(&*state.lock(&id).await?))
}

async fn run(state: &Arc<AppState>, id: &SessionId, command: SessionCommand) -> ApiResult {
    Ok(view(&*state.execute(id, command).await?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FramingBody {
    decision_text: String,
    ideal_qualities_text: String,
}

async fn submit_framing(
    State(state): State<Arc<AppState>>,
    Path(id): Path<SessionId>,
    Json(body): Json<FramingBody>,
) -> ApiResult {
    run(
        &state,
        &id,
        SessionCommand::FramingSubmitted {
            decision_text: body.decision_text,
            ideal_qualities_text: body.ideal_qualities_text,
        },
    )
    .await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StatusBody {
    status: OptionStatus,
}

async fn toggle_option(
    State(state): State<Arc<AppState>>,
    Path((id, option_id)): Path<(SessionId, OptionId)>,
    Json(body): Json<StatusBody>,
) -> ApiResult {
    run(
        &state,
        &id,
        SessionCommand::OptionToggled {
            option_id,
            status: body.status,
        },
    )
    .await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TextBody {
    text: String,
}

async fn add_option(
    State(state): State<Arc<AppState>>,
    Path(id): Path<SessionId>,
    Json(body): Json<TextBody>,
) -> ApiResult {
    run(&state, &id, SessionCommand::CustomOptionAdded { text: body.text }).await
}

async fn confirm_narrowing(State(state): State<Arc<AppState>>, Path(id): Path<SessionId>) -> ApiResult {
    run(&state, &id, SessionCommand::NarrowingConfirmed).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelBody {
    label: String,
}

async fn add_criterion(
    State(state): State<Arc<AppState>>,
    Path(id): Path<SessionId>,
    Json(body): Json<LabelBody>,
) -> ApiResult {
    run(&state, &id, SessionCommand::CriterionAdded { label: body.label }).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TierBody {
    tier: Tier,
}

async fn set_tier(
    State(state): State<Arc<AppState>>,
    Path((id, criterion_id)): Path<(SessionId, CriterionId)>,
    Json(body): Json<TierBody>,
) -> ApiResult {
    run(
        &state,
        &id,
        SessionCommand::TierSet {
            criterion_id,
            tier: body.tier,
        },
    )
    .await
}

async fn remove_criterion(
    State(state): State<Arc<AppState>>,
    Path((id, criterion_id)): Path<(SessionId, CriterionId)>,
) -> ApiResult {
    run(&state, &id, SessionCommand::CriterionRemoved { criterion_id }).await
}

async fn confirm_prioritization(State(state): State<Arc<AppState>>, Path(id): Path<SessionId>) -> ApiResult {
    run(&state, &id, SessionCommand::PrioritizationConfirmed).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SelectionBody {
    selected_ids: Vec<DefinitionId>,
    #[serde(default)]
    custom_texts: Vec<String>,
}

async fn select_definitions(
    State(state): State<Arc<AppState>>,
    Path((id, criterion_id)): Path<(SessionId, CriterionId)>,
    Json(body): Json<SelectionBody>,
) -> ApiResult {
    run(
        &state,
        &id,
        SessionCommand::DefinitionsSelected {
            criterion_id,
            selected_ids: body.selected_ids,
            custom_texts: body.custom_texts,
        },
    )
    .await
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FinishBody {
    #[serde(default)]
    finish: bool,
}

async fn confirm_redefinition(
    State(state): State<Arc<AppState>>,
    Path(id): Path<SessionId>,
    body: Bytes,
) -> ApiResult {
    let FinishBody { finish } = optional_body(&body)?;
    run(&state, &id, SessionCommand::confirm_redefinition(finish)).await
}

#[derive(Serialize)]
struct EventsView<'a> {
    session_id: &'a SessionId,
    events: &'a [SessionEvent],
}

async fn events(State(state): State<Arc<AppState>>, Path(id): Path<SessionId>) -> ApiResult {
    let slot = state.lock(&id).await?;
    Ok(axum::Json(EventsView {
        session_id: &slot.recorded.session().id,
        events: slot.recorded.log().events(),
    })
    .into_response())
}

async fn summary(State(state): State<Arc<AppState>>, Path(id): Path<SessionId>) -> ApiResult {
    let log = state.lock(&id).await?.recorded.log().clone();
    Ok(axum::Json(history::summarize(&log)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchBody {
    at_seq: u64,
}

async fn branch(
    State(state): State<Arc<AppState>>,
    Path(id): Path<SessionId>,
    Json(body): Json<BranchBody>,
) -> ApiResult {
    let child = {
        let slot = state.lock(&id).await?;
        slot.recorded.branch(body.at_seq, SessionId::random())?
    };
    let handle = state.insert(child)?;
    let mut slot = handle.lock().await;
    state.start_generation(&mut slot);
    Ok((StatusCode::CREATED, axum::Json(SessionView::of(&slot))).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExportQuery {
    format: Option<String>,
}

async fn export(
    State(state): State<Arc<AppState>>,
    Path(id): Path<SessionId>,
    query: Result<Query<ExportQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult {
    let Query(query) = query?;
    let format: ExportFormat = query
        .format
        .as_deref()
        .unwrap_or("json")
        .parse()
        .map_err(ApiError::BadRequest)?;
    let document = {
        let slot = state.lock(&id).await?;
        CriteriaExport::from_session(slot.recorded.session()).render(format)
    };
    let content_type = match format {
        ExportFormat::Json => "application/json",
        ExportFormat::Markdown => "text/markdown; charset=utf-8",
    };
    Ok(([(header::CONTENT_TYPE, content_type)], document).into_response())
}

async fn retry_generation(State(state): State<Arc<AppState>>, Path(id): Path<SessionId>) -> ApiResult {
    Ok(view(&*state.generate_now(&id).await?))
}
