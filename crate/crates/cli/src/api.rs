//! HTTP session service. Bodies are JSON; every error is
//! `{"error": {"code": ..., "message": ...}}` with a stable code.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use semwork_core::display::ToDesc;
use semwork_core::engine::{
    DerivationSession, DisplayOptions, Engine, EngineError, ParamSet, SessionLog, StepAction, DIMENSIONS,
};
use semwork_core::syntax::tokenize;
use semwork_core::term::{parse_term, Signature, Term};
use semwork_core::translate::drs_to_fol;
use semwork_grapher::{layout, print_desc, render_svg, Style};

use crate::view::{report_view, session_view, SessionView, TermText};

/// Version of the request and response formats.
pub const PROTOCOL_VERSION: &str = "1";

pub const DEFAULT_IDLE: Duration = Duration::from_secs(60 * 60);

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    fn no_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session `{id}`"))
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let status = match &e {
            EngineError::UnknownNode(_) => StatusCode::NOT_FOUND,
            EngineError::NotApplicable { .. } | EngineError::NothingToUndo => StatusCode::CONFLICT,
            EngineError::InvalidParams(_)
            | EngineError::EmptySentence
            | EngineError::UnknownWord(_)
            | EngineError::NoParse
            | EngineError::NoSuchTree { .. }
            | EngineError::Translate(_) => StatusCode::BAD_REQUEST,
            // a step that was advertised but failed underneath
            _ => StatusCode::CONFLICT,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

struct Entry {
    /// Held while a step is applied; readers never take it.
    writer: tokio::sync::Mutex<()>,
    current: RwLock<Arc<DerivationSession>>,
    last_used: Mutex<Instant>,
}

impl Entry {
    fn new(s: DerivationSession) -> Self {
        Entry {
            writer: tokio::sync::Mutex::new(()),
            current: RwLock::new(Arc::new(s)),
            last_used: Mutex::new(Instant::now()),
        }
    }

    fn snapshot(&self) -> Arc<DerivationSession> {
        *self.last_used.lock().expect("clock lock") = Instant::now();
        self.current.read().expect("session lock").clone()
    }

    fn replace(&self, s: DerivationSession) {
        *self.current.write().expect("session lock") = Arc::new(s);
    }
}

pub struct AppState {
    pub engine: Engine,
    idle: Duration,
    sessions: Mutex<HashMap<String, Arc<Entry>>>,
}

impl AppState {
    pub fn new(engine: Engine, idle: Duration) -> Self {
        AppState {
            engine,
            idle,
            sessions: Mutex::new(HashMap::new()),
        }
    }

    /// Drops sessions idle for longer than the expiry time.
    fn sweep(&self) {
        let now = Instant::now();
        self.sessions
            .lock()
            .expect("session table")
            .retain(|_, e| now.duration_since(*e.last_used.lock().expect("clock lock")) < self.idle);
    }

    fn entry(&self, id: &str) -> ApiResult<Arc<Entry>> {
        self.sweep();
        self.sessions
            .lock()
            .expect("session table")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::no_session(id))
    }

    /// Stores a session under its own id if that is free, else a new one.
    fn insert(&self, mut s: DerivationSession) -> Arc<DerivationSession> {
        self.sweep();
        let mut table = self.sessions.lock().expect("session table");
        if s.id.is_empty() || table.contains_key(&s.id) {
            s.id = uuid::Uuid::new_v4().simple().to_string();
        }
        let e = Arc::new(Entry::new(s));
        let snap = e.snapshot();
        table.insert(snap.id.clone(), e);
        snap
    }

    pub fn session_count(&self) -> usize {
        self.sweep();
        self.sessions.lock().expect("session table").len()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/import", post(import_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/nodes/{node}/step", post(step))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/render", get(render))
        .route("/sessions/{id}/export", get(export))
        .route("/params", get(params))
        .route("/translate", post(translate))
        .route("/compare", post(compare))
        .with_state(state)
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("bad request body: {e}")))
}

/// A sentence as one string or as a token list.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Sentence {
    Text(String),
    Tokens(Vec<String>),
}

impl Sentence {
    fn tokens(&self) -> Vec<String> {
        match self {
            Sentence::Text(s) => tokenize(s),
            Sentence::Tokens(t) => t.iter().flat_map(|w| tokenize(w)).collect(),
        }
    }
}

/// Parameters as a partial map from dimension to value; missing ones take
/// their defaults. Display options go under `display`.
fn param_set(v: Option<&Value>) -> ApiResult<ParamSet> {
    let mut p = ParamSet::default();
    let Some(v) = v else { return Ok(p) };
    let obj = v
        .as_object()
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "InvalidParams", "params must be an object"))?;
    let invalid = |m: String| ApiError::new(StatusCode::BAD_REQUEST, "InvalidParams", m);
    for (k, v) in obj {
        if k == "display" {
            p.display = serde_json::from_value(v.clone()).map_err(|e| invalid(e.to_string()))?;
            continue;
        }
        let s = v.as_str().ok_or_else(|| invalid(format!("`{k}` must be a string")))?;
        p.set(k, s).map_err(invalid)?;
    }
    Ok(p)
}

#[derive(Debug, Deserialize)]
struct CreateRequest {
    sentence: Sentence,
    params: Option<Value>,
    #[serde(default)]
    tree: usize,
}

fn with_desc(s: &DerivationSession, include: bool) -> SessionView {
    let mut v = session_view(s);
    if include {
        v.desc = Some(print_desc(&s.to_desc(&s.params.display)));
    }
    v
}

async fn create_session(State(st): State<Arc<AppState>>, bytes: Bytes) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let req: CreateRequest = body(&bytes)?;
    let params = param_set(req.params.as_ref())?;
    let s = st.engine.open_session_tree(&req.sentence.tokens(), &params, req.tree)?;
    let s = st.insert(s);
    Ok((StatusCode::CREATED, Json(with_desc(&s, true))))
}

async fn get_session(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let s = st.entry(&id)?.snapshot();
    Ok(Json(with_desc(&s, true)))
}

async fn delete_session(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    st.entry(&id)?;
    st.sessions.lock().expect("session table").remove(&id);
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
struct StepRequest {
    action: String,
}

#[derive(Debug, Serialize)]
struct StepResponse {
    session: SessionView,
    /// Nodes whose state the step changed.
    changed: Vec<usize>,
    report: crate::view::ReportView,
}

async fn step(
    State(st): State<Arc<AppState>>,
    Path((id, node)): Path<(String, usize)>,
    bytes: Bytes,
) -> ApiResult<Json<StepResponse>> {
    let req: StepRequest = body(&bytes)?;
    let action: StepAction = req
        .action
        .parse()
        .map_err(|m: String| ApiError::new(StatusCode::BAD_REQUEST, "UnknownAction", m))?;
    let entry = st.entry(&id)?;
    let _w = entry.writer.lock().await;
    let before = entry.snapshot();
    let mut s = (*before).clone();
    let report = s.apply_step(node, action)?;
    let changed = (0..s.nodes.len()).filter(|&i| s.nodes[i] != before.nodes[i]).collect();
    let session = with_desc(&s, false);
    entry.replace(s);
    Ok(Json(StepResponse {
        session,
        changed,
        report: report_view(&report),
    }))
}

async fn undo(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let entry = st.entry(&id)?;
    let _w = entry.writer.lock().await;
    let s = st.engine.undo(&entry.snapshot())?;
    let v = with_desc(&s, true);
    entry.replace(s);
    Ok(Json(v))
}

#[derive(Debug, Deserialize)]
struct RenderQuery {
    format: Option<String>,
    #[serde(rename = "stack-reductions")]
    stack_reductions: Option<bool>,
    #[serde(rename = "box-nodes")]
    box_nodes: Option<String>,
}

async fn render(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<RenderQuery>,
) -> ApiResult<Response> {
    let s = st.entry(&id)?.snapshot();
    let mut opts: DisplayOptions = s.params.display.clone();
    if let Some(b) = q.stack_reductions {
        opts.stack_reductions = b;
    }
    if let Some(b) = &q.box_nodes {
        opts.set("box-nodes", b).map_err(ApiError::bad_request)?;
    }
    let d = s.to_desc(&opts);
    match q.format.as_deref().unwrap_or("desc") {
        "desc" => Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], print_desc(&d)).into_response()),
        "svg" => {
            let style = Style::default();
            let svg = render_svg(&layout(&d, &style), &style);
            Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
        }
        f => Err(ApiError::bad_request(format!(
            "unknown format `{f}`, expected desc or svg"
        ))),
    }
}

async fn export(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionLog>> {
    Ok(Json(st.entry(&id)?.snapshot().log()))
}

async fn import_session(State(st): State<Arc<AppState>>, bytes: Bytes) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let log: SessionLog = body(&bytes)?;
    let s = st.engine.replay(&log)?;
    let s = st.insert(s);
    Ok((StatusCode::CREATED, Json(with_desc(&s, true))))
}

fn names<T: std::fmt::Display>(xs: &[T]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

async fn params(State(st): State<Arc<AppState>>) -> Json<Value> {
    let r = &st.engine.registry;
    let grammars: Vec<String> = r.grammars.iter().map(|g| g.id.clone()).collect();
    let mut dims = BTreeMap::new();
    let mappings: Vec<String> = r.mappings.iter().map(|m| m.kind.to_string()).collect();
    dims.insert("formalism", names(&r.formalisms));
    dims.insert("reducer", names(&r.reducers));
    dims.insert("storage", names(&r.storage));
    dims.insert("grammar", grammars);
    dims.insert("parser", names(&r.parsers));
    dims.insert("mapping", mappings);
    let valid = r.enumerate_valid_params();
    Json(json!({
        "version": PROTOCOL_VERSION,
        "order": DIMENSIONS,
        "dimensions": dims,
        "defaults": ParamSet::default(),
        "display": {
            "stack-reductions": "bool",
            "box-nodes": "list of node ids",
        },
        "count": valid.len(),
        "valid": valid,
    }))
}

#[derive(Debug, Deserialize)]
struct TranslateRequest {
    term: String,
    #[serde(default = "fol")]
    to: String,
}

fn fol() -> String {
    "fol".into()
}

async fn translate(bytes: Bytes) -> ApiResult<Json<TermText>> {
    let req: TranslateRequest = body(&bytes)?;
    if req.to != "fol" {
        return Err(ApiError::bad_request(format!(
            "unknown target `{}`, expected fol",
            req.to
        )));
    }
    let t = parse_term(&req.term, &Signature::new())
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "TermSyntax", e.to_string()))?;
    let Term::Drs(d) = &t else {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "NotADrs",
            "only DRSs translate to first-order logic",
        ));
    };
    let f = drs_to_fol(d).map_err(EngineError::from)?;
    Ok(Json(TermText::of(&f)))
}

#[derive(Debug, Deserialize)]
struct CompareRequest {
    sentence: Sentence,
    params: Vec<Value>,
}

async fn compare(State(st): State<Arc<AppState>>, bytes: Bytes) -> ApiResult<Json<Vec<Value>>> {
    let req: CompareRequest = body(&bytes)?;
    let toks = req.sentence.tokens();
    if toks.is_empty() {
        return Err(EngineError::EmptySentence.into());
    }
    let mut out = Vec::new();
    for p in &req.params {
        let r = param_set(Some(p)).and_then(|p| Ok(st.engine.open_session(&toks, &p)?));
        out.push(match r {
            Ok(s) => serde_json::to_value(with_desc(&st.insert(s), true)).expect("view serialises"),
            Err(e) => json!({ "error": { "code": e.code, "message": e.message } }),
        });
    }
    Ok(Json(out))
}
