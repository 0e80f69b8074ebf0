//! Local HTTP API over a pipeline output directory: browse patterns and
//! their source witnesses, record labels, read metrics and the stopping
//! verdict.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;

use crate::frontend::{MethodCfg, MethodRef, NodeId, Span};
use crate::io::read_jsonl;
use crate::mining::{PatternStats, Witness};
use crate::pipeline::{load_patterns, load_verdicts, read_run_summary, Layout, PipelineError};
use crate::triage::{compute_metrics, should_continue, unlabeled_investigated, FilterVerdict, LabelError, LabelRecord, LabelStore};

/// Immutable run artifacts plus the one writable resource, the label log.
pub struct AppState {
    corpus: PathBuf,
    max_size: usize,
    patterns: Vec<PatternStats>,
    by_id: HashMap<String, usize>,
    verdicts: Vec<FilterVerdict>,
    cfgs: HashMap<MethodRef, MethodCfg>,
    labels: RwLock<LabelStore>,
}

impl AppState {
    pub fn load(layout: &Layout) -> Result<Self, PipelineError> {
        let summary = read_run_summary(layout)?;
        let patterns = load_patterns(layout)?;
        let verdicts = load_verdicts(layout)?;
        let cfgs: Vec<MethodCfg> = read_jsonl(&layout.cfgs(), false)?;
        let labels = LabelStore::open(&layout.labels(), patterns.iter().map(|p| p.id.clone()))?;
        Ok(AppState {
            corpus: summary.corpus,
            max_size: summary.max_size,
            by_id: patterns.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect(),
            patterns,
            verdicts,
            cfgs: cfgs.into_iter().map(|c| (c.method.clone(), c)).collect(),
            labels: RwLock::new(labels),
        })
    }

    fn verdict(&self, id: &str) -> Option<&FilterVerdict> {
        self.verdicts.iter().find(|v| v.pattern_id == id)
    }
}

#[derive(Debug, Serialize)]
struct ApiError {
    error: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    unlabeled: Vec<String>,
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    (status, Json(ApiError { error: msg.into(), unlabeled: vec![] })).into_response()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PatternView {
    pub pattern: PatternStats,
    pub verdict: Option<FilterVerdict>,
    pub label: Option<LabelRecord>,
}

#[derive(Debug, Deserialize)]
struct PatternQuery {
    size: Option<usize>,
    investigated: Option<bool>,
}

async fn list_patterns(State(st): State<Arc<AppState>>, Query(q): Query<PatternQuery>) -> Json<Vec<PatternView>> {
    let latest = st.labels.read().await.latest();
    let views = st
        .patterns
        .iter()
        .filter(|p| q.size.is_none_or(|s| p.size == s))
        .filter_map(|p| {
            let verdict = st.verdict(&p.id).cloned();
            let investigated = verdict.as_ref().is_some_and(|v| v.investigated);
            if q.investigated.is_some_and(|want| want != investigated) {
                return None;
            }
            Some(PatternView { pattern: p.clone(), verdict, label: latest.get(&p.id).cloned() })
        })
        .collect();
    Json(views)
}

async fn get_pattern(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(&i) = st.by_id.get(&id) else {
        return error(StatusCode::NOT_FOUND, format!("unknown pattern id `{id}`"));
    };
    let label = st.labels.read().await.latest().remove(&id);
    let p = &st.patterns[i];
    Json(PatternView { pattern: p.clone(), verdict: st.verdict(&id).cloned(), label }).into_response()
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Snippet {
    pub span: Span,
    pub text: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NodeSnippet {
    pub node_id: NodeId,
    pub span: Span,
    pub text: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Example {
    pub witness: Witness,
    /// Whole method source.
    pub method: Option<Snippet>,
    /// Source of each matched node, in pattern node order.
    pub nodes: Vec<NodeSnippet>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Examples {
    pub pattern_id: String,
    pub examples: Vec<Example>,
}

fn example(st: &AppState, w: &Witness) -> Example {
    let text = std::fs::read_to_string(st.corpus.join(&w.method.file_path)).ok();
    let cfg = st.cfgs.get(&w.method);
    let snippet = |span: Span| text.as_deref().and_then(|t| span.slice(t)).map(str::to_string);
    let method = cfg.and_then(|c| {
        let span = c.node(c.entry_id).span;
        snippet(span).map(|text| Snippet { span, text })
    });
    let nodes = cfg
        .map(|c| {
            w.node_ids
                .iter()
                .filter_map(|&id| {
                    let span = c.nodes.get(id)?.span;
                    Some(NodeSnippet { node_id: id, span, text: snippet(span)? })
                })
                .collect()
        })
        .unwrap_or_default();
    Example { witness: w.clone(), method, nodes }
}

async fn pattern_examples(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(&i) = st.by_id.get(&id) else {
        return error(StatusCode::NOT_FOUND, format!("unknown pattern id `{id}`"));
    };
    let examples = st.patterns[i].witnesses.iter().map(|w| example(&st, w)).collect();
    Json(Examples { pattern_id: id, examples }).into_response()
}

#[derive(Debug, Deserialize)]
struct LabelInput {
    pattern_id: String,
    sugarable: bool,
    #[serde(default)]
    sugar_name: Option<String>,
    #[serde(default)]
    notes: String,
    #[serde(default)]
    labeler: String,
    #[serde(default)]
    timestamp: Option<DateTime<Utc>>,
}

async fn post_label(State(st): State<Arc<AppState>>, Json(input): Json<LabelInput>) -> Response {
    let rec = LabelRecord {
        pattern_id: input.pattern_id,
        sugarable: input.sugarable,
        sugar_name: input.sugar_name,
        notes: input.notes,
        labeler: input.labeler,
        timestamp: input.timestamp.unwrap_or_else(Utc::now),
    };
    let mut store = st.labels.write().await;
    match store.record(rec) {
        Ok(saved) => (StatusCode::CREATED, Json(saved.clone())).into_response(),
        Err(e @ LabelError::UnknownPattern(_)) => error(StatusCode::NOT_FOUND, e.to_string()),
        Err(e @ LabelError::NamedButNotSugarable(_)) => error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn metrics(State(st): State<Arc<AppState>>) -> Response {
    let latest = st.labels.read().await.latest();
    Json(compute_metrics(&st.patterns, &st.verdicts, &latest)).into_response()
}

#[derive(Debug, Deserialize)]
struct ContinueQuery {
    size: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ContinueVerdict {
    pub size: usize,
    pub max_size: usize,
    pub new_sugars: usize,
    #[serde(rename = "continue")]
    pub proceed: bool,
}

async fn continue_check(State(st): State<Arc<AppState>>, Query(q): Query<ContinueQuery>) -> Response {
    let latest = st.labels.read().await.latest();
    let metrics = compute_metrics(&st.patterns, &st.verdicts, &latest);
    let unlabeled = unlabeled_investigated(&st.patterns, &st.verdicts, &latest, q.size);
    match should_continue(&metrics, q.size, st.max_size, &unlabeled) {
        Ok(proceed) => Json(ContinueVerdict {
            size: q.size,
            max_size: st.max_size,
            new_sugars: metrics.iter().find(|m| m.size == q.size).map_or(0, |m| m.new_sugars),
            proceed,
        })
        .into_response(),
        Err(e) => (StatusCode::CONFLICT, Json(ApiError { error: e.to_string(), unlabeled: e.unlabeled })).into_response(),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/patterns", get(list_patterns))
        .route("/api/patterns/{id}", get(get_pattern))
        .route("/api/patterns/{id}/examples", get(pattern_examples))
        .route("/api/labels", post(post_label))
        .route("/api/metrics", get(metrics))
        .route("/api/continue", get(continue_check))
        .with_state(state)
}

/// Serves on localhost until the process is stopped.
pub async fn serve(state: Arc<AppState>, port: u16) -> std::io::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("serving on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
