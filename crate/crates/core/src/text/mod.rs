//! Text NER over the five text entity types: context windows, label
//! mapping from external corpora, and extractor backends.

mod export;
mod gazetteer;
mod labelmap;
mod remote;
mod windows;

pub use export::{text_training_records, SpanRecord, WindowRecord};
pub use gazetteer::{dominant, fold_token, gazetteer_key, initialism, Gazetteer, Modality, TypeCounts};
pub use labelmap::{map_labels, ExternalDoc, ExternalSpan, LabelMapError, LabelMapSpec, SourceSchema};
pub use remote::{RemoteTextExtractor, TEXT_EXTRACT_PATH};
pub use windows::{build_windows, ContextWindow, DEFAULT_WORD_BUDGET};

use crate::backend::ExtractError;
use crate::docmodel::{AnnotatedDocument, Entity, EntityId};
use crate::latex::ParsedDocument;
use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TextError {
    #[error("no gold documents to train on")]
    EmptyTrainingSet,
}

/// A text NER backend.
pub trait TextExtractor: Sync {
    fn extract_text(&self, doc: &ParsedDocument) -> Result<Vec<Entity>, ExtractError>;
}

/// Runs `backend` and tidies its output: non-text types and exact
/// duplicates are dropped and ids are renumbered from zero.
pub fn extract_text(doc: &ParsedDocument, backend: &dyn TextExtractor) -> Result<Vec<Entity>, ExtractError> {
    let mut seen = BTreeSet::new();
    let mut out: Vec<Entity> = backend
        .extract_text(doc)?
        .into_iter()
        .filter(|e| e.etype.is_text_type() && !e.anchor.is_table())
        .filter(|e| seen.insert((e.anchor, e.etype)))
        .collect();
    out.sort_by_key(|e| (e.anchor, e.etype));
    for (i, e) in out.iter_mut().enumerate() {
        e.id = EntityId(i as u64);
    }
    Ok(out)
}

/// Gazetteer over the gold documents' text entities.
pub fn train_gazetteer(gold_docs: &[AnnotatedDocument]) -> Result<Gazetteer, TextError> {
    Gazetteer::train(gold_docs, Modality::Text)
}
