use super::{AnnotatedDocument, CorpusPartition, DocModelError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Read access to annotated documents, plus versioned writes.
pub trait DocStore {
    fn get(&self, doc_id: &str) -> Option<AnnotatedDocument>;

    /// Stores `doc` if the stored version equals `expected_version` (0 for
    /// a new document); the stored copy gets version `expected_version + 1`.
    fn put(&mut self, doc: AnnotatedDocument, expected_version: u64) -> Result<u64, DocModelError>;

    fn ids(&self) -> Vec<String>;
}

#[derive(Debug, Clone, Default)]
pub struct MemoryStore {
    docs: BTreeMap<String, AnnotatedDocument>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces without a version check.
    pub fn insert(&mut self, doc: AnnotatedDocument) {
        self.docs.insert(doc.doc_id().to_string(), doc);
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

impl FromIterator<AnnotatedDocument> for MemoryStore {
    fn from_iter<I: IntoIterator<Item = AnnotatedDocument>>(iter: I) -> Self {
        let mut store = MemoryStore::new();
        for d in iter {
            store.insert(d);
        }
        store
    }
}

impl DocStore for MemoryStore {
    fn get(&self, doc_id: &str) -> Option<AnnotatedDocument> {
        self.docs.get(doc_id).cloned()
    }

    fn put(&mut self, mut doc: AnnotatedDocument, expected_version: u64) -> Result<u64, DocModelError> {
        let current = self.docs.get(doc.doc_id()).map_or(0, |d| d.version);
        if current != expected_version {
            return Err(DocModelError::StaleVersion {
                expected: expected_version,
                current,
            });
        }
        doc.version = current + 1;
        let v = doc.version;
        self.insert(doc);
        Ok(v)
    }

    fn ids(&self) -> Vec<String> {
        self.docs.keys().cloned().collect()
    }
}

/// Per-paper averages over a partition.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StatsTable {
    pub docs: usize,
    pub sentences: f64,
    pub words: f64,
    pub tables: f64,
    pub cells: f64,
    pub text_entities: f64,
    pub table_entities: f64,
    pub table_relations: f64,
}

impl StatsTable {
    pub fn row(&self) -> [f64; 7] {
        [
            self.sentences,
            self.words,
            self.tables,
            self.cells,
            self.text_entities,
            self.table_entities,
            self.table_relations,
        ]
    }
}

impl fmt::Display for StatsTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<18}{:>10}", "papers", self.docs)?;
        let names = ["sentences", "words", "tables", "cells", "text entities", "table entities", "table relations"];
        for (name, v) in names.iter().zip(self.row()) {
            writeln!(f, "{name:<18}{v:>10.1}")?;
        }
        Ok(())
    }
}

/// Arithmetic means per paper. Every entity and relation stored is
/// counted, including nested spans.
pub fn corpus_stats(partition: &CorpusPartition, store: &dyn DocStore) -> Result<StatsTable, DocModelError> {
    let mut totals = [0usize; 7];
    for id in &partition.doc_ids {
        let d = store
            .get(id)
            .ok_or_else(|| DocModelError::MissingDocument(id.clone()))?;
        let counts = [
            d.doc.sentence_count(),
            d.doc.word_count(),
            d.doc.tables.len(),
            d.doc.tables.iter().map(|t| t.cell_count()).sum(),
            d.text_entities().count(),
            d.table_entities().count(),
            d.relations.len(),
        ];
        for (t, c) in totals.iter_mut().zip(counts) {
            *t += c;
        }
    }
    let n = partition.doc_ids.len();
    let mean = |x: usize| if n == 0 { 0.0 } else { x as f64 / n as f64 };
    Ok(StatsTable {
        docs: n,
        sentences: mean(totals[0]),
        words: mean(totals[1]),
        tables: mean(totals[2]),
        cells: mean(totals[3]),
        text_entities: mean(totals[4]),
        table_entities: mean(totals[5]),
        table_relations: mean(totals[6]),
    })
}
