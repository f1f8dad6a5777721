//! Read-only HTTP/JSON query service over a loaded report.
//!
//! * `GET /v1/summary`: validation summary, per-class counts, stability.
//! * `GET /v1/prefix/<prefix>`: pairs whose prefix equals or is covered by
//!   the query. Nothing flagged yields `{"pairs": []}`.
//! * `GET /v1/class/<name>?page=N&per_page=M`: pairs of one class, paged.
//!
//! Errors are `{"error": {"code": ..., "message": ...}}` with status 400 or
//! 404. The store is never mutated by a request; [`SharedStore::swap`]
//! replaces it wholesale between requests.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::{json, Value};

use super::{ClassificationReport, PairRecord};
use crate::error::{Error, Result};
use crate::model::{InvalidClass, IpPrefix};
use crate::trie::PrefixTrie;

pub const DEFAULT_PER_PAGE: usize = 100;
pub const MAX_PER_PAGE: usize = 1000;

/// A report with lookup indexes.
pub struct ReportStore {
    report: ClassificationReport,
    by_prefix: PrefixTrie<Vec<u32>>,
    by_class: [Vec<u32>; 7],
}

impl ReportStore {
    pub fn new(report: ClassificationReport) -> Self {
        let mut by_prefix: PrefixTrie<Vec<u32>> = PrefixTrie::new();
        let mut by_class: [Vec<u32>; 7] = Default::default();
        for (i, pair) in report.pairs.iter().enumerate() {
            by_prefix
                .entry_or_insert_with(pair.prefix, Vec::new)
                .push(i as u32);
            by_class[pair.class.index()].push(i as u32);
        }
        ReportStore {
            report,
            by_prefix,
            by_class,
        }
    }

    pub fn report(&self) -> &ClassificationReport {
        &self.report
    }

    pub fn summary(&self) -> Value {
        json!({
            "date": self.report.date,
            "validation_summary": self.report.validation_summary,
            "per_class": self.report.per_class,
            "stability": self.report.stability,
        })
    }

    /// Pairs at or below `query`, in prefix order.
    pub fn covered_pairs(&self, query: &IpPrefix) -> Vec<&PairRecord> {
        self.by_prefix
            .covered_by(query)
            .flat_map(|(_, ids, _)| ids.iter().map(|&i| &self.report.pairs[i as usize]))
            .collect()
    }

    /// One page (1-based) of a class, plus the class total.
    pub fn class_page(&self, class: InvalidClass, page: usize, per_page: usize) -> (usize, Vec<&PairRecord>) {
        let ids = &self.by_class[class.index()];
        let start = page.saturating_sub(1).saturating_mul(per_page);
        let pairs = ids
            .iter()
            .skip(start)
            .take(per_page)
            .map(|&i| &self.report.pairs[i as usize])
            .collect();
        (ids.len(), pairs)
    }
}

/// The currently served store.
pub struct SharedStore {
    current: RwLock<Arc<ReportStore>>,
}

impl SharedStore {
    pub fn new(report: ClassificationReport) -> Self {
        SharedStore {
            current: RwLock::new(Arc::new(ReportStore::new(report))),
        }
    }

    pub fn current(&self) -> Arc<ReportStore> {
        self.current.read().expect("store lock poisoned").clone()
    }

    /// Replaces the served report. In-flight requests keep the old one.
    pub fn swap(&self, report: ClassificationReport) {
        let next = Arc::new(ReportStore::new(report));
        *self.current.write().expect("store lock poisoned") = next;
    }
}

fn error(status: StatusCode, code: &str, message: String) -> Response {
    (
        status,
        Json(json!({ "error": { "code": code, "message": message } })),
    )
        .into_response()
}

async fn summary(State(store): State<Arc<SharedStore>>) -> Response {
    Json(store.current().summary()).into_response()
}

async fn by_prefix(State(store): State<Arc<SharedStore>>, Path(raw): Path<String>) -> Response {
    let query: IpPrefix = match raw.parse() {
        Ok(p) => p,
        Err(e) => return error(StatusCode::BAD_REQUEST, "malformed-prefix", e.to_string()),
    };
    let store = store.current();
    Json(json!({ "pairs": store.covered_pairs(&query) })).into_response()
}

fn page_param(params: &HashMap<String, String>, name: &str, default: usize) -> Result<usize, Box<Response>> {
    match params.get(name) {
        None => Ok(default),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Box::new(error(
                StatusCode::BAD_REQUEST,
                "bad-parameter",
                format!("{name} must be a positive integer"),
            ))),
        },
    }
}

async fn by_class(
    State(store): State<Arc<SharedStore>>,
    Path(name): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> Response {
    let class: InvalidClass = match name.parse() {
        Ok(c) => c,
        Err(_) => {
            return error(
                StatusCode::NOT_FOUND,
                "unknown-class",
                format!("no class named {name:?}"),
            )
        }
    };
    let page = match page_param(&params, "page", 1) {
        Ok(v) => v,
        Err(r) => return *r,
    };
    let per_page = match page_param(&params, "per_page", DEFAULT_PER_PAGE) {
        Ok(v) => v.min(MAX_PER_PAGE),
        Err(r) => return *r,
    };
    let store = store.current();
    let (total, pairs) = store.class_page(class, page, per_page);
    Json(json!({
        "class": class,
        "page": page,
        "per_page": per_page,
        "total": total,
        "pairs": pairs,
    }))
    .into_response()
}

async fn not_found() -> Response {
    error(StatusCode::NOT_FOUND, "not-found", "no such endpoint".into())
}

pub fn router(store: Arc<SharedStore>) -> Router {
    Router::new()
        .route("/v1/summary", get(summary))
        .route("/v1/prefix/{*prefix}", get(by_prefix))
        .route("/v1/class/{name}", get(by_class))
        .fallback(not_found)
        .with_state(store)
}

/// Serves on an already bound listener until the future is dropped.
pub async fn serve(store: Arc<SharedStore>, listener: tokio::net::TcpListener) -> Result<()> {
    axum::serve(listener, router(store)).await?;
    Ok(())
}

/// Binds `addr` and serves until interrupted.
pub fn serve_blocking(store: Arc<SharedStore>, addr: SocketAddr) -> Result<()> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Error::Config(format!("cannot bind {addr}: {e}")))?;
        tracing::info!(%addr, "serving report");
        axum::serve(listener, router(store))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
