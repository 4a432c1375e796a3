use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::Json;
use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use bwtx_core::analysis::{self, DEFAULT_MAX_GAP};
use bwtx_core::escape::escape_byte;
use bwtx_core::session::{load_session, save_session, LoadWarning, Session, SessionEntry};
use bwtx_core::{
    find_match, move_char, parse_ordering, prefix_search, preset_ordering_with, window,
    AlphabetOrdering, Direction, OrderConstraint, Placement, Preset, RunStatistics, TextBuffer,
    Transform, WindowSpec,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{ApiError, AppState};

type Shared = State<Arc<AppState>>;
type ApiResult<T> = Result<T, ApiError>;

fn query<T>(q: Result<Query<T>, QueryRejection>) -> ApiResult<T> {
    q.map(|Query(v)| v)
        .map_err(|e| ApiError::bad_request(e.body_text()))
}

fn body<T>(b: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    b.map(|Json(v)| v)
        .map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))
}

#[derive(Serialize)]
struct AlphabetEntry {
    byte: u8,
    char: String,
    count: usize,
}

#[derive(Serialize)]
pub(crate) struct TransformSummary {
    transform_id: u64,
    name: String,
    order: Vec<u8>,
    display: String,
    highlights: Vec<usize>,
    stats: RunStatistics,
}

fn summarize(e: &SessionEntry) -> TransformSummary {
    TransformSummary {
        transform_id: e.id,
        name: e.name().to_string(),
        order: e.ordering().order().to_vec(),
        display: e.ordering().display_order(),
        highlights: e.highlights.iter().copied().collect(),
        stats: *e.transform.stats(),
    }
}

fn text_summary(text: &TextBuffer) -> Value {
    let alphabet: Vec<AlphabetEntry> = text
        .alphabet()
        .into_iter()
        .map(|b| AlphabetEntry {
            byte: b,
            char: escape_byte(b),
            count: text.count(b),
        })
        .collect();
    json!({
        "end_marker": escape_byte(text.end_marker()),
        "end_marker_byte": text.end_marker(),
        "alphabet": alphabet,
        "size": text.len(),
    })
}

fn with_id(id: &str, mut v: Value) -> Value {
    v["session_id"] = Value::String(id.to_string());
    v
}

fn entry(s: &Session, tid: u64) -> ApiResult<&SessionEntry> {
    s.entry(tid).map_err(|_| ApiError::transform_not_found(tid))
}

pub(crate) async fn create_session(
    State(state): Shared,
    data: Bytes,
) -> ApiResult<impl IntoResponse> {
    if data.len() > state.config.max_text_bytes {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "TextTooLarge",
            format!("text exceeds {} bytes", state.config.max_text_bytes),
        ));
    }
    let text = TextBuffer::new(data.to_vec())?;
    let summary = text_summary(&text);
    let id = state.insert(Session::new(Arc::new(text)));
    Ok((StatusCode::CREATED, Json(with_id(&id, summary))))
}

pub(crate) async fn get_session(
    State(state): Shared,
    Path(sid): Path<String>,
) -> ApiResult<Json<Value>> {
    let handle = state.handle(&sid)?;
    let s = handle.session.read().await;
    let mut v = text_summary(s.text());
    v["window"] = json!({ "rows": s.window.rows, "cols": s.window.cols });
    v["transforms"] = json!(s.entries().iter().map(summarize).collect::<Vec<_>>());
    Ok(Json(with_id(&sid, v)))
}

pub(crate) async fn list_transforms(
    State(state): Shared,
    Path(sid): Path<String>,
) -> ApiResult<Json<Vec<TransformSummary>>> {
    let handle = state.handle(&sid)?;
    let s = handle.session.read().await;
    Ok(Json(s.entries().iter().map(summarize).collect()))
}

pub(crate) async fn get_transform(
    State(state): Shared,
    Path((sid, tid)): Path<(String, u64)>,
) -> ApiResult<Json<TransformSummary>> {
    let handle = state.handle(&sid)?;
    let s = handle.session.read().await;
    Ok(Json(summarize(entry(&s, tid)?)))
}

pub(crate) async fn remove_transform(
    State(state): Shared,
    Path((sid, tid)): Path<(String, u64)>,
) -> ApiResult<StatusCode> {
    let handle = state.handle(&sid)?;
    let mut s = handle.session.write().await;
    s.remove(tid)?;
    Ok(StatusCode::NO_CONTENT)
}

/// Ordering request: exactly one of a preset name, a comma list, or byte
/// values least first.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct OrderingRequest {
    preset: Option<String>,
    custom: Option<String>,
    order: Option<Vec<u8>>,
    name: Option<String>,
}

fn resolve_ordering(
    state: &AppState,
    text: &TextBuffer,
    req: OrderingRequest,
) -> ApiResult<AlphabetOrdering> {
    let ordering = match (req.preset, req.custom, req.order) {
        (Some(p), None, None) => {
            let preset: Preset = p.parse()?;
            preset_ordering_with(preset, text, &state.config.tables)?
        }
        (None, Some(spec), None) => parse_ordering(&spec, text)?,
        (None, None, Some(order)) => {
            let name = order
                .iter()
                .map(|&b| escape_byte(b))
                .collect::<Vec<_>>()
                .join("<");
            AlphabetOrdering::for_text(name, text, order)?
        }
        _ => {
            return Err(ApiError::bad_request(
                "give exactly one of \"preset\", \"custom\" or \"order\"",
            ))
        }
    };
    Ok(match req.name {
        Some(name) => ordering.with_name(name),
        None => ordering,
    })
}

pub(crate) async fn add_transform(
    State(state): Shared,
    Path(sid): Path<String>,
    req: Result<Json<OrderingRequest>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let req = body(req)?;
    let handle = state.handle(&sid)?;
    let text = handle.session.read().await.text().clone();
    let ordering = resolve_ordering(&state, &text, req)?;
    let built = blocking(move || Transform::build(text, ordering)).await??;
    let mut s = handle.session.write().await;
    let id = s.add_transform(Arc::new(built))?;
    Ok((StatusCode::CREATED, Json(summarize(entry(&s, id)?))))
}

#[derive(Deserialize)]
pub(crate) struct WindowQuery {
    #[serde(default)]
    top_row: usize,
    #[serde(default)]
    left_col: usize,
    height: Option<usize>,
    width: Option<usize>,
}

pub(crate) async fn get_window(
    State(state): Shared,
    Path((sid, tid)): Path<(String, u64)>,
    q: Result<Query<WindowQuery>, QueryRejection>,
) -> ApiResult<Json<Value>> {
    let q = query(q)?;
    let handle = state.handle(&sid)?;
    let s = handle.session.read().await;
    let e = entry(&s, tid)?;
    let height = q.height.unwrap_or(s.window.rows);
    let width = q.width.unwrap_or(s.window.cols);
    let max = state.config.max_window_side;
    if height > max || width > max {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "WindowTooLarge",
            format!("windows are limited to {max}x{max}"),
        ));
    }
    let g = window(
        &e.transform,
        WindowSpec::new(q.top_row, q.left_col, height, width),
    )?;
    let rows: Vec<String> = g.rows().map(|r| BASE64.encode(r)).collect();
    let shown = g.top_row..g.top_row + g.height;
    let highlights: Vec<usize> = e.highlights.range(shown).copied().collect();
    Ok(Json(json!({
        "transform_id": tid,
        "size": e.transform.len(),
        "top_row": g.top_row,
        "left_col": g.left_col,
        "height": g.height,
        "width": g.width,
        "truncated": g.truncated,
        "rows": rows,
        "last_column": BASE64.encode(&g.last_column),
        "highlights": highlights,
    })))
}

#[derive(Deserialize)]
pub(crate) struct SearchQuery {
    pattern: Option<String>,
    pattern_b64: Option<String>,
    from_row: Option<usize>,
    #[serde(default = "forward")]
    direction: Direction,
}

fn forward() -> Direction {
    Direction::Forward
}

pub(crate) async fn search(
    State(state): Shared,
    Path((sid, tid)): Path<(String, u64)>,
    q: Result<Query<SearchQuery>, QueryRejection>,
) -> ApiResult<Json<Value>> {
    let q = query(q)?;
    let pattern = match (q.pattern, q.pattern_b64) {
        (Some(p), None) => p.into_bytes(),
        (None, Some(b)) => BASE64
            .decode(b)
            .map_err(|e| ApiError::bad_request(format!("pattern_b64: {e}")))?,
        _ => {
            return Err(ApiError::bad_request(
                "give one of \"pattern\" or \"pattern_b64\"",
            ))
        }
    };
    if pattern.is_empty() {
        return Err(ApiError::bad_request("pattern is empty"));
    }
    let handle = state.handle(&sid)?;
    let s = handle.session.read().await;
    let t = &entry(&s, tid)?.transform;
    let hits = prefix_search(t, &pattern);
    let row = match q.from_row {
        Some(from) if from >= t.len() => {
            return Err(ApiError::new(
                StatusCode::RANGE_NOT_SATISFIABLE,
                "OutOfBounds",
                format!("row {from} is outside the {}-row matrix", t.len()),
            ))
        }
        Some(from) => find_match(t, &pattern, from, q.direction),
        None if hits.is_empty() => None,
        None => Some(match q.direction {
            Direction::Forward => hits.start,
            Direction::Backward => hits.end - 1,
        }),
    };
    Ok(Json(json!({
        "row": row,
        "interval": [hits.start, hits.end],
        "count": hits.len(),
    })))
}

#[derive(Deserialize)]
pub(crate) struct HighlightRequest {
    row: usize,
    #[serde(default = "yes")]
    on: bool,
}

fn yes() -> bool {
    true
}

pub(crate) async fn highlight(
    State(state): Shared,
    Path((sid, tid)): Path<(String, u64)>,
    req: Result<Json<HighlightRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let req = body(req)?;
    let handle = state.handle(&sid)?;
    let mut s = handle.session.write().await;
    let rows: Vec<usize> = s
        .set_highlight(tid, req.row, req.on)?
        .iter()
        .copied()
        .collect();
    Ok(Json(json!({ "transform_id": tid, "highlights": rows })))
}

#[derive(Deserialize)]
pub(crate) struct PropagateRequest {
    row: usize,
}

pub(crate) async fn propagate(
    State(state): Shared,
    Path((sid, tid)): Path<(String, u64)>,
    req: Result<Json<PropagateRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let req = body(req)?;
    let handle = state.handle(&sid)?;
    let mut s = handle.session.write().await;
    let rows: Vec<Value> = s
        .propagate(tid, req.row)?
        .into_iter()
        .map(|(id, row)| json!({ "transform_id": id, "row": row }))
        .collect();
    Ok(Json(json!({ "rows": rows })))
}

#[derive(Deserialize)]
pub(crate) struct AnalysisQuery {
    kind: String,
    max_gap: Option<usize>,
    /// Index into the section list, for `pairs`.
    section: Option<usize>,
    limit: Option<usize>,
}

pub(crate) async fn analyze(
    State(state): Shared,
    Path((sid, tid)): Path<(String, u64)>,
    q: Result<Query<AnalysisQuery>, QueryRejection>,
) -> ApiResult<Json<Value>> {
    let q = query(q)?;
    let handle = state.handle(&sid)?;
    let t = {
        let s = handle.session.read().await;
        entry(&s, tid)?.transform.clone()
    };
    let payload = blocking(move || analysis_payload(&t, &q)).await??;
    Ok(Json(payload))
}

pub(crate) fn analysis_payload(t: &Transform, q: &AnalysisQuery) -> ApiResult<Value> {
    let limit = q.limit.unwrap_or(usize::MAX);
    Ok(match q.kind.as_str() {
        "run_breakers" => {
            let items: Vec<_> = analysis::run_breakers(t).into_iter().take(limit).collect();
            json!({ "kind": "run_breakers", "items": items })
        }
        "potential_runs" => {
            let gap = q.max_gap.unwrap_or(DEFAULT_MAX_GAP);
            let items: Vec<_> = analysis::potential_runs(t, gap).into_iter().take(limit).collect();
            json!({ "kind": "potential_runs", "max_gap": gap, "items": items })
        }
        "sections" => {
            json!({ "kind": "sections", "items": analysis::sections(t) })
        }
        "pairs" => {
            let sections = analysis::sections(t);
            let index = q
                .section
                .ok_or_else(|| ApiError::bad_request("\"pairs\" needs a section index"))?;
            let section = sections.get(index).ok_or_else(|| {
                ApiError::new(
                    StatusCode::RANGE_NOT_SATISFIABLE,
                    "OutOfBounds",
                    format!("section {index} of {}", sections.len()),
                )
            })?;
            let items: Vec<OrderConstraint> = analysis::distinguishing_pairs(t, section)?
                .into_iter()
                .take(limit)
                .collect();
            json!({ "kind": "pairs", "section": section, "items": items })
        }
        other => {
            return Err(ApiError::bad_request(format!(
                "unknown analysis kind {other:?}; expected run_breakers, potential_runs, sections or pairs"
            )))
        }
    })
}

#[derive(Deserialize)]
pub(crate) struct ConstraintRequest {
    lesser: u8,
    greater: u8,
}

#[derive(Deserialize)]
pub(crate) struct MoveRequest {
    ch: u8,
    anchor: u8,
    placement: Placement,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ProposeRequest {
    base_transform_id: u64,
    #[serde(default)]
    constraints: Vec<ConstraintRequest>,
    #[serde(rename = "move")]
    move_: Option<MoveRequest>,
}

pub(crate) async fn propose_ordering(
    State(state): Shared,
    Path(sid): Path<String>,
    req: Result<Json<ProposeRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let req = body(req)?;
    let handle = state.handle(&sid)?;
    let (text, base) = {
        let s = handle.session.read().await;
        (
            s.text().clone(),
            entry(&s, req.base_transform_id)?.ordering().clone(),
        )
    };
    let constraints: Vec<OrderConstraint> = req
        .constraints
        .iter()
        .map(|c| OrderConstraint::new(c.lesser, c.greater))
        .collect();
    let combined = analysis::combine_constraints(&constraints, &base)?;
    let proposed = match req.move_ {
        Some(m) => move_char(&combined, m.ch, m.anchor, m.placement)?,
        None => combined,
    };
    let preview = {
        let proposed = proposed.clone();
        blocking(move || analysis::evaluate_ordering(&text, &proposed)).await??
    };
    Ok(Json(json!({
        "order": proposed.order(),
        "display": proposed.display_order(),
        "spec": proposed.to_spec(),
        "preview_stats": preview,
    })))
}

#[derive(Deserialize)]
pub(crate) struct ExportQuery {
    cache: Option<bool>,
}

pub(crate) async fn export_session(
    State(state): Shared,
    Path(sid): Path<String>,
    q: Result<Query<ExportQuery>, QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let q = query(q)?;
    let handle = state.handle(&sid)?;
    let s = handle.session.read().await;
    let cache = q
        .cache
        .unwrap_or(s.cache_policy == bwtx_core::session::CachePolicy::CacheL);
    let bytes = save_session(&s, cache)?;
    Ok((
        [
            (header::CONTENT_TYPE, "application/octet-stream"),
            (
                header::CONTENT_DISPOSITION,
                "attachment; filename=\"session.bwtx\"",
            ),
        ],
        bytes,
    ))
}

fn warning_json(w: &LoadWarning) -> Value {
    match w {
        LoadWarning::CacheInvalid { id, reason } => {
            json!({ "code": "CacheInvalid", "transform_id": id, "message": reason })
        }
    }
}

async fn load(data: Bytes) -> ApiResult<(Session, Vec<Value>)> {
    let loaded = blocking(move || load_session(&data)).await??;
    let warnings = loaded.warnings.iter().map(warning_json).collect();
    Ok((loaded.session, warnings))
}

pub(crate) async fn import_new(State(state): Shared, data: Bytes) -> ApiResult<impl IntoResponse> {
    let (session, warnings) = load(data).await?;
    let id = state.insert(session);
    Ok((
        StatusCode::CREATED,
        Json(json!({ "session_id": id, "warnings": warnings })),
    ))
}

pub(crate) async fn import_into(
    State(state): Shared,
    Path(sid): Path<String>,
    data: Bytes,
) -> ApiResult<Json<Value>> {
    let handle = state.handle(&sid)?;
    let (session, warnings) = load(data).await?;
    *handle.session.write().await = session;
    Ok(Json(json!({ "session_id": sid, "warnings": warnings })))
}
