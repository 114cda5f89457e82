use super::{DocFailure, PipelineError, ReviewTask, TaskStatus, Workspace};
use crate::backend::ExtractError;
use crate::docmodel::{validate, AnnotatedDocument, ReviewState};
use crate::latex::ParsedDocument;
use crate::table::{extract_table, TableConfig, TableExtractor};
use crate::text::{extract_text, TextExtractor};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// Text extraction, then table extraction guided by the text entities.
pub fn annotate_document(
    doc: &ParsedDocument,
    text: &dyn TextExtractor,
    table: &dyn TableExtractor,
    cfg: &TableConfig,
    round: u32,
) -> Result<AnnotatedDocument, ExtractError> {
    let text_entities = extract_text(doc, text)?;
    let mut out = AnnotatedDocument::new(doc.clone(), round);
    out.absorb(text_entities.clone(), Vec::new());
    for (t, grid) in doc.tables.iter().enumerate() {
        let x = extract_table(grid, t, &text_entities, table, cfg)?;
        out.absorb(x.entities, x.relations);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage1Options {
    pub round: u32,
    pub table: TableConfig,
    pub workers: usize,
}

impl Default for Stage1Options {
    fn default() -> Self {
        Stage1Options { round: 1, table: TableConfig::default(), workers: 4 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stage1Report {
    pub annotated: Vec<String>,
    /// Documents already under review or gold, left untouched.
    pub skipped: Vec<String>,
    pub failures: Vec<DocFailure>,
    /// Per-document wall seconds.
    pub seconds: BTreeMap<String, f64>,
    /// Validation findings over all annotated documents.
    pub findings: usize,
}

enum Outcome {
    Done { secs: f64, findings: usize },
    Skipped,
}

/// Auto-annotates `doc_ids` and queues each for review. A failing
/// document is recorded in `errors.json` and the rest continue. Documents
/// a reviewer has touched are never overwritten, so re-running after an
/// interruption converges to the same files.
pub fn run_stage1(
    ws: &Workspace,
    doc_ids: &[String],
    text: &dyn TextExtractor,
    table: &dyn TableExtractor,
    opts: &Stage1Options,
) -> Result<Stage1Report, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| PipelineError::Training(e.to_string()))?;
    let one = |id: &String| -> Result<Outcome, PipelineError> {
        if ws.has_annotation(id) && ws.load_annotation(id)?.review_state != ReviewState::Unreviewed {
            return Ok(Outcome::Skipped);
        }
        let parsed = ws.load_parsed(id)?;
        let start = Instant::now();
        let doc = annotate_document(&parsed, text, table, &opts.table, opts.round).map_err(PipelineError::Extract)?;
        let secs = start.elapsed().as_secs_f64();
        let findings = validate(&doc).findings.len();
        ws.save_annotation(&doc)?;
        ws.save_task(&ReviewTask {
            doc_id: id.clone(),
            round: opts.round,
            status: TaskStatus::Pending,
            assigned_to: None,
            version: doc.version,
        })?;
        Ok(Outcome::Done { secs, findings })
    };
    let results: Vec<(String, Result<Outcome, PipelineError>)> =
        pool.install(|| doc_ids.par_iter().map(|id| (id.clone(), one(id))).collect());

    let mut report = Stage1Report::default();
    for (id, r) in results {
        match r {
            Ok(Outcome::Done { secs, findings }) => {
                report.seconds.insert(id.clone(), secs);
                report.findings += findings;
                report.annotated.push(id);
            }
            Ok(Outcome::Skipped) => report.skipped.push(id),
            Err(e) => {
                log::error!("stage 1 failed on `{id}`: {e}");
                report.failures.push(DocFailure { doc_id: id, error: e.to_string() });
            }
        }
    }
    ws.save_failures(&report.failures)?;
    Ok(report)
}
