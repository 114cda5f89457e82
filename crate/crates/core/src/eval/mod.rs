//! Strict-match scoring, error categories, label distribution and
//! throughput.

mod errors;
mod report;
mod speed;

pub use errors::{categorize_errors, ErrorCounts, ErrorItem};
pub use report::{evaluate, EvalOptions, EvalReport, Task};
pub use speed::{hardware_summary, measure_speed, time_batches, SpeedReport, Throughput, DEFAULT_BATCH};

use crate::docmodel::{Anchor, AnnotatedDocument, EntityType};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no table entities to count")]
    EmptyCorpus,
}

/// Precision, recall and F1 from pooled counts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Prf {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Prf { tp, fp, fn_, precision, recall, f1 }
    }

    /// Pools the counts of two results.
    pub fn merge(&self, other: &Prf) -> Prf {
        Prf::from_counts(self.tp + other.tp, self.fp + other.fp, self.fn_ + other.fn_)
    }
}

/// Match key of an entity: document, exact anchor and type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NerKey {
    pub doc: String,
    pub anchor: Anchor,
    pub etype: EntityType,
}

/// Match key of a relation: document, table and the unordered pair of
/// endpoint anchors, plus endpoint types when matching strictly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReKey {
    pub doc: String,
    pub table: usize,
    pub a: Anchor,
    pub b: Anchor,
    pub types: Option<(EntityType, EntityType)>,
}

impl ReKey {
    pub fn new(doc: &str, table: usize, x: (Anchor, EntityType), y: (Anchor, EntityType), strict_types: bool) -> ReKey {
        let (x, y) = if x.0 <= y.0 { (x, y) } else { (y, x) };
        ReKey {
            doc: doc.to_string(),
            table,
            a: x.0,
            b: y.0,
            types: strict_types.then_some((x.1, y.1)),
        }
    }
}

fn score_sets<K: Ord>(gold: &BTreeSet<K>, pred: &BTreeSet<K>) -> Prf {
    let tp = gold.intersection(pred).count();
    Prf::from_counts(tp, pred.len() - tp, gold.len() - tp)
}

/// Exact-match scoring of entity sets; boundary and type must both agree.
pub fn score_ner<'a>(gold: impl IntoIterator<Item = &'a NerKey>, pred: impl IntoIterator<Item = &'a NerKey>) -> Prf {
    score_sets(&gold.into_iter().collect(), &pred.into_iter().collect())
}

/// Exact-match scoring of relation sets on their endpoint boundaries.
pub fn score_re<'a>(gold: impl IntoIterator<Item = &'a ReKey>, pred: impl IntoIterator<Item = &'a ReKey>) -> Prf {
    score_sets(&gold.into_iter().collect(), &pred.into_iter().collect())
}

/// Entity keys of a document, text or table side.
pub fn ner_keys(doc: &AnnotatedDocument, table: bool) -> Vec<NerKey> {
    doc.entities
        .iter()
        .filter(|e| e.anchor.is_table() == table)
        .map(|e| NerKey { doc: doc.doc_id().to_string(), anchor: e.anchor, etype: e.etype })
        .collect()
}

/// Relation keys of a document. Relations with a dangling endpoint are
/// skipped.
pub fn re_keys(doc: &AnnotatedDocument, strict_types: bool) -> Vec<ReKey> {
    doc.relations
        .iter()
        .filter_map(|r| {
            let a = doc.entity(r.e1)?;
            let b = doc.entity(r.e2)?;
            Some(ReKey::new(doc.doc_id(), r.table_idx, (a.anchor, a.etype), (b.anchor, b.etype), strict_types))
        })
        .collect()
}

/// Share of each type among the table entities of `docs`.
pub fn entity_distribution(docs: &[AnnotatedDocument]) -> Result<BTreeMap<EntityType, f64>, EvalError> {
    let mut counts: BTreeMap<EntityType, usize> = BTreeMap::new();
    for d in docs {
        for e in d.table_entities() {
            *counts.entry(e.etype).or_default() += 1;
        }
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return Err(EvalError::EmptyCorpus);
    }
    Ok(counts.into_iter().map(|(t, n)| (t, n as f64 / total as f64)).collect())
}
