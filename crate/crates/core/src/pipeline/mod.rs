//! The iterative annotation loop: auto-annotate, review, retrain.

mod corrections;
pub mod review;
mod rounds;
mod stage1;
mod workspace;

pub use corrections::{apply_corrections, complete_review, merge_review, Correction};
pub use rounds::{
    advance_round, load_gazetteers, sha256_hex, train_artifacts, Round, TABLE_EXPORT, TABLE_GAZETTEER, TEXT_EXPORT, TEXT_GAZETTEER,
};
pub use stage1::{annotate_document, run_stage1, Stage1Options, Stage1Report};
pub use workspace::{write_atomic, DocFailure, LogAction, LogEntry, ReviewTask, TaskStatus, Workspace, WorkspaceLock};

use crate::backend::ExtractError;
use crate::docmodel::DocModelError;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("stale version: expected {expected}, document is at {current}")]
    StaleVersion { expected: u64, current: u64 },
    #[error("correction {index} rejected: {reason}")]
    InvalidCorrection { index: usize, reason: String },
    #[error("document `{0}` is already gold")]
    AlreadyGold(String),
    #[error("review of `{0}` is complete; reopen it first")]
    TaskDone(String),
    #[error("`{doc_id}` is claimed by {by}")]
    TaskClaimed { doc_id: String, by: String },
    #[error("no new gold documents since the last round")]
    NoNewGold,
    #[error("document `{0}` not found")]
    MissingDocument(String),
    #[error("`{0}` is not a workspace")]
    NotAWorkspace(String),
    #[error("workspace is locked ({0})")]
    WorkspaceLocked(String),
    #[error("training failed: {0}")]
    Training(String),
    #[error(transparent)]
    DocModel(#[from] DocModelError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

impl PipelineError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        PipelineError::Io { path: path.display().to_string(), message: e.to_string() }
    }
}
