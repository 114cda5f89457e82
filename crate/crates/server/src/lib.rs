//! Review service: HTTP/JSON access to a workspace's review queue.
//!
//! Reads run concurrently; writes to one document are serialized by a
//! per-document lock and checked against the document version, so a stale
//! client gets `409` with the current version instead of overwriting.

mod error;
mod schema;

pub use error::ApiError;
pub use schema::{color_of, schema, Schema, TypeInfo, PALETTE};

use axum::extract::{Path, Query, Request, State};
use axum::http::header::AUTHORIZATION;
use axum::middleware::{self, Next};
use axum::response::Response;
use axum::routing::{get, post};
use axum::{Json, Router};
use scimine_core::docmodel::{validate, AnnotatedDocument, PartitionManifest, Entity, ReviewState, TableRelation, ValidationReport};
use scimine_core::latex::{DomainTag, ParsedDocument};
use scimine_core::pipeline::{review, Correction, LogEntry, PipelineError, ReviewTask, Round, TaskStatus, Workspace, WorkspaceLock};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("address {0} is already in use")]
    AddrInUse(SocketAddr),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone)]
pub struct AppState {
    ws: Arc<Workspace>,
    token: Option<Arc<str>>,
    doc_locks: Arc<Mutex<HashMap<String, Arc<Mutex<()>>>>>,
}

impl AppState {
    /// `token`: when set, every `/api` request needs `Authorization: Bearer <token>`.
    pub fn new(ws: Workspace, token: Option<String>) -> Self {
        AppState { ws: Arc::new(ws), token: token.map(Into::into), doc_locks: Arc::default() }
    }

    fn doc_lock(&self, id: &str) -> Arc<Mutex<()>> {
        let mut locks = self.doc_locks.lock().unwrap_or_else(|e| e.into_inner());
        Arc::clone(locks.entry(id.to_string()).or_default())
    }

    /// Runs blocking workspace I/O off the async runtime.
    async fn blocking<T: Send + 'static>(
        &self,
        f: impl FnOnce(&Workspace) -> Result<T, PipelineError> + Send + 'static,
    ) -> Result<T, ApiError> {
        let ws = Arc::clone(&self.ws);
        tokio::task::spawn_blocking(move || f(&ws))
            .await
            .map_err(|e| ApiError::internal(e.to_string()))?
            .map_err(ApiError::from)
    }

    /// Like [`Self::blocking`], holding the document's write lock.
    async fn write<T: Send + 'static>(
        &self,
        id: &str,
        f: impl FnOnce(&Workspace) -> Result<T, PipelineError> + Send + 'static,
    ) -> Result<T, ApiError> {
        let lock = self.doc_lock(id);
        self.blocking(move |ws| {
            let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
            f(ws)
        })
        .await
    }
}

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/docs", get(list_docs))
        .route("/docs/{id}", get(get_doc).patch(patch_doc))
        .route("/docs/{id}/claim", post(claim_doc))
        .route("/docs/{id}/complete", post(complete_doc))
        .route("/docs/{id}/reopen", post(reopen_doc))
        .route("/docs/{id}/log", get(doc_log))
        .route("/rounds", get(rounds))
        .route("/schema", get(|| async { Json(schema()) }))
        .layer(middleware::from_fn_with_state(state.clone(), auth))
        .with_state(state);
    Router::new().nest("/api", api)
}

async fn auth(State(state): State<AppState>, req: Request, next: Next) -> Result<Response, ApiError> {
    if let Some(token) = &state.token {
        let presented = req
            .headers()
            .get(AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "));
        if presented != Some(&**token) {
            return Err(ApiError::unauthorized());
        }
    }
    Ok(next.run(req).await)
}

/// A bound service. Holds the workspace lock until dropped.
pub struct Server {
    listener: tokio::net::TcpListener,
    app: Router,
    _lock: WorkspaceLock,
}

impl Server {
    /// Locks the workspace and binds `addr`. A second service on the same
    /// workspace fails with `WorkspaceLocked`.
    pub async fn bind(ws: Workspace, addr: SocketAddr, token: Option<String>) -> Result<Server, ServeError> {
        let lock = ws.lock()?;
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| match e.kind() {
            std::io::ErrorKind::AddrInUse => ServeError::AddrInUse(addr),
            _ => ServeError::Io(e),
        })?;
        Ok(Server { listener, app: router(AppState::new(ws, token)), _lock: lock })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub async fn run(self) -> std::io::Result<()> {
        log::info!("review service listening on {}", self.listener.local_addr()?);
        axum::serve(self.listener, self.app).await
    }
}

/// Binds and runs until the process is stopped.
pub async fn serve(ws: Workspace, addr: SocketAddr, token: Option<String>) -> Result<(), ServeError> {
    Server::bind(ws, addr, token).await?.run().await?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DocSummary {
    pub doc_id: String,
    pub domain: DomainTag,
    pub status: TaskStatus,
    pub review_state: ReviewState,
    pub round: u32,
    pub version: u64,
    pub assigned_to: Option<String>,
    pub entities: usize,
    pub relations: usize,
    pub tables: usize,
}

fn status_of(doc: &AnnotatedDocument, task: Option<&ReviewTask>) -> TaskStatus {
    match (task, doc.review_state) {
        (Some(t), _) => t.status,
        (None, ReviewState::Gold) => TaskStatus::Done,
        (None, ReviewState::InReview) => TaskStatus::InProgress,
        (None, ReviewState::Unreviewed) => TaskStatus::Pending,
    }
}

#[derive(Debug, Deserialize)]
struct ListQuery {
    status: Option<String>,
    domain: Option<String>,
}

async fn list_docs(State(state): State<AppState>, Query(q): Query<ListQuery>) -> Result<Json<Vec<DocSummary>>, ApiError> {
    let status: Option<TaskStatus> = match q.status.as_deref().filter(|s| !s.is_empty()) {
        Some(s) => Some(serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| ApiError::bad_request(format!("unknown status `{s}`")))?),
        None => None,
    };
    let domain: Option<DomainTag> = match q.domain.as_deref().filter(|s| !s.is_empty()) {
        Some(d) => Some(d.parse().map_err(ApiError::bad_request)?),
        None => None,
    };
    let all = state
        .blocking(|ws| {
            let tasks: HashMap<String, ReviewTask> = ws.tasks()?.into_iter().map(|t| (t.doc_id.clone(), t)).collect();
            Ok(ws.annotations()?.into_iter().map(|d| {
                let task = tasks.get(d.doc_id()).cloned();
                (d, task)
            }).collect::<Vec<_>>())
        })
        .await?;
    let out = all
        .into_iter()
        .map(|(d, task)| DocSummary {
            doc_id: d.doc_id().to_string(),
            domain: d.doc.domain_tag,
            status: status_of(&d, task.as_ref()),
            review_state: d.review_state,
            round: d.round_tag,
            version: d.version,
            assigned_to: task.and_then(|t| t.assigned_to),
            entities: d.entities.len(),
            relations: d.relations.len(),
            tables: d.doc.tables.len(),
        })
        .filter(|s| status.is_none_or(|st| s.status == st) && domain.is_none_or(|dm| s.domain == dm))
        .collect();
    Ok(Json(out))
}

/// A document with its annotations, as served to reviewers.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DocView {
    pub doc_id: String,
    pub version: u64,
    pub review_state: ReviewState,
    pub round: u32,
    pub status: TaskStatus,
    pub task: Option<ReviewTask>,
    pub document: ParsedDocument,
    pub entities: Vec<Entity>,
    pub relations: Vec<TableRelation>,
    pub validation: ValidationReport,
}

fn view(ws: &Workspace, doc: AnnotatedDocument) -> Result<DocView, PipelineError> {
    let task = ws.task(doc.doc_id())?;
    let validation = validate(&doc);
    Ok(DocView {
        doc_id: doc.doc_id().to_string(),
        version: doc.version,
        review_state: doc.review_state,
        round: doc.round_tag,
        status: status_of(&doc, task.as_ref()),
        task,
        validation,
        document: doc.doc,
        entities: doc.entities,
        relations: doc.relations,
    })
}

async fn get_doc(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<DocView>, ApiError> {
    Ok(Json(state.blocking(move |ws| view(ws, ws.load_annotation(&id)?)).await?))
}

#[derive(Debug, Deserialize)]
pub struct PatchBody {
    pub version: u64,
    pub corrections: Vec<Correction>,
    #[serde(default)]
    pub reviewer: Option<String>,
}

async fn patch_doc(State(state): State<AppState>, Path(id): Path<String>, Json(body): Json<PatchBody>) -> Result<Json<DocView>, ApiError> {
    let key = id.clone();
    let doc = state
        .write(&key, move |ws| {
            let next = review::patch(ws, &id, body.reviewer.as_deref(), body.version, body.corrections)?;
            view(ws, next)
        })
        .await?;
    Ok(Json(doc))
}

#[derive(Debug, Deserialize)]
pub struct ClaimBody {
    pub reviewer: String,
}

async fn claim_doc(State(state): State<AppState>, Path(id): Path<String>, Json(body): Json<ClaimBody>) -> Result<Json<ReviewTask>, ApiError> {
    let key = id.clone();
    Ok(Json(state.write(&key, move |ws| review::claim(ws, &id, &body.reviewer)).await?))
}

#[derive(Debug, Deserialize)]
pub struct CompleteBody {
    pub version: u64,
    #[serde(default)]
    pub reviewer: Option<String>,
}

async fn complete_doc(State(state): State<AppState>, Path(id): Path<String>, Json(body): Json<CompleteBody>) -> Result<Json<DocView>, ApiError> {
    let key = id.clone();
    let doc = state
        .write(&key, move |ws| {
            let gold = review::complete(ws, &id, body.reviewer.as_deref(), body.version)?;
            view(ws, gold)
        })
        .await?;
    Ok(Json(doc))
}

#[derive(Debug, Default, Deserialize)]
pub struct ReopenBody {
    #[serde(default)]
    pub reviewer: Option<String>,
}

async fn reopen_doc(State(state): State<AppState>, Path(id): Path<String>, body: Option<Json<ReopenBody>>) -> Result<Json<DocView>, ApiError> {
    let key = id.clone();
    let reviewer = body.and_then(|Json(b)| b.reviewer);
    let doc = state
        .write(&key, move |ws| {
            let next = review::reopen(ws, &id, reviewer.as_deref())?;
            view(ws, next)
        })
        .await?;
    Ok(Json(doc))
}

async fn doc_log(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Vec<LogEntry>>, ApiError> {
    Ok(Json(
        state
            .blocking(move |ws| {
                ws.load_annotation(&id)?;
                ws.read_log(&id)
            })
            .await?,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RoundsView {
    pub rounds: Vec<Round>,
    /// Gold documents, sorted.
    pub gold: Vec<String>,
    pub partitions: PartitionManifest,
}

async fn rounds(State(state): State<AppState>) -> Result<Json<RoundsView>, ApiError> {
    Ok(Json(
        state
            .blocking(|ws| {
                let mut gold: Vec<String> = ws
                    .annotations()?
                    .into_iter()
                    .filter(|d| d.review_state == ReviewState::Gold)
                    .map(|d| d.doc_id().to_string())
                    .collect();
                gold.sort();
                Ok(RoundsView { rounds: ws.rounds()?, gold, partitions: ws.manifest()? })
            })
            .await?,
    ))
}
