//! Review session operations on a workspace. Callers serialize calls per
//! document; the version check rejects stale writers.

use super::{apply_corrections, complete_review, Correction, LogAction, LogEntry, PipelineError, ReviewTask, TaskStatus, Workspace};
use crate::docmodel::{AnnotatedDocument, ReviewState};

fn log(ws: &Workspace, doc_id: &str, reviewer: Option<&str>, base_version: u64, action: LogAction) -> Result<(), PipelineError> {
    let seq = ws.read_log(doc_id)?.len() as u64;
    ws.append_log(doc_id, &LogEntry { seq, reviewer: reviewer.map(str::to_string), base_version, action })
}

fn task_or_default(ws: &Workspace, doc: &AnnotatedDocument) -> Result<ReviewTask, PipelineError> {
    Ok(ws.task(doc.doc_id())?.unwrap_or(ReviewTask {
        doc_id: doc.doc_id().to_string(),
        round: doc.round_tag,
        status: TaskStatus::Pending,
        assigned_to: None,
        version: doc.version,
    }))
}

fn ensure_base(ws: &Workspace, doc: &AnnotatedDocument) -> Result<(), PipelineError> {
    if ws.review_base(doc.doc_id())?.is_none() {
        ws.save_review_base(doc)?;
    }
    Ok(())
}

/// Assigns the document to `reviewer`. Done tasks need a reopen first.
pub fn claim(ws: &Workspace, doc_id: &str, reviewer: &str) -> Result<ReviewTask, PipelineError> {
    let doc = ws.load_annotation(doc_id)?;
    let mut task = task_or_default(ws, &doc)?;
    match (&task.status, &task.assigned_to) {
        (TaskStatus::Done, _) => return Err(PipelineError::TaskDone(doc_id.to_string())),
        (TaskStatus::InProgress, Some(other)) if other != reviewer => {
            return Err(PipelineError::TaskClaimed { doc_id: doc_id.to_string(), by: other.clone() })
        }
        _ => {}
    }
    ensure_base(ws, &doc)?;
    task.status = TaskStatus::InProgress;
    task.assigned_to = Some(reviewer.to_string());
    task.version = doc.version;
    log(ws, doc_id, Some(reviewer), doc.version, LogAction::Claim)?;
    ws.save_task(&task)?;
    Ok(task)
}

pub fn patch(
    ws: &Workspace,
    doc_id: &str,
    reviewer: Option<&str>,
    version: u64,
    corrections: Vec<Correction>,
) -> Result<AnnotatedDocument, PipelineError> {
    let doc = ws.load_annotation(doc_id)?;
    let next = apply_corrections(&doc, version, &corrections)?;
    ensure_base(ws, &doc)?;
    log(ws, doc_id, reviewer, version, LogAction::Patch { corrections })?;
    ws.save_annotation(&next)?;
    let mut task = task_or_default(ws, &next)?;
    task.status = TaskStatus::InProgress;
    if task.assigned_to.is_none() {
        task.assigned_to = reviewer.map(str::to_string);
    }
    task.version = next.version;
    ws.save_task(&task)?;
    Ok(next)
}

pub fn complete(ws: &Workspace, doc_id: &str, reviewer: Option<&str>, version: u64) -> Result<AnnotatedDocument, PipelineError> {
    let doc = ws.load_annotation(doc_id)?;
    if doc.review_state == ReviewState::Gold {
        return Err(PipelineError::AlreadyGold(doc_id.to_string()));
    }
    let gold = complete_review(&doc, version)?;
    ensure_base(ws, &doc)?;
    log(ws, doc_id, reviewer, version, LogAction::Complete)?;
    ws.save_annotation(&gold)?;
    let mut task = task_or_default(ws, &gold)?;
    task.status = TaskStatus::Done;
    task.version = gold.version;
    ws.save_task(&task)?;
    Ok(gold)
}

/// Returns a gold document to review.
pub fn reopen(ws: &Workspace, doc_id: &str, reviewer: Option<&str>) -> Result<AnnotatedDocument, PipelineError> {
    let doc = ws.load_annotation(doc_id)?;
    let next = reopened(&doc);
    log(ws, doc_id, reviewer, doc.version, LogAction::Reopen)?;
    ws.save_annotation(&next)?;
    let mut task = task_or_default(ws, &next)?;
    task.status = TaskStatus::Pending;
    task.assigned_to = None;
    task.version = next.version;
    ws.save_task(&task)?;
    Ok(next)
}

fn reopened(doc: &AnnotatedDocument) -> AnnotatedDocument {
    let mut next = doc.clone();
    next.review_state = ReviewState::InReview;
    next.version += 1;
    next
}

/// Rebuilds a document from its pre-review state and its review log.
pub fn replay(base: &AnnotatedDocument, log: &[LogEntry]) -> Result<AnnotatedDocument, PipelineError> {
    let mut doc = base.clone();
    for entry in log {
        doc = match &entry.action {
            LogAction::Claim => doc,
            LogAction::Patch { corrections } => apply_corrections(&doc, entry.base_version, corrections)?,
            LogAction::Complete => complete_review(&doc, entry.base_version)?,
            LogAction::Reopen => reopened(&doc),
        };
    }
    Ok(doc)
}
