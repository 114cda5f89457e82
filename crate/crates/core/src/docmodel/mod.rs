//! Typed annotation layer over parsed documents: entities anchored in
//! sentences or table cells, untyped table relations, corpus partitions,
//! and guideline validation.

mod io;
mod normalize;
mod partition;
mod stats;
mod validate;

pub use io::{read_jsonl, write_jsonl, ANNOTATIONS_SCHEMA};
pub use normalize::{fold_surface, normalize_surface, DETERMINERS, GENERIC_HEADS};
pub use partition::{CorpusPartition, PartitionManifest, PartitionName};
pub use stats::{corpus_stats, DocStore, MemoryStore, StatsTable};
pub use validate::{validate, Finding, RuleId, Severity, ValidationReport, REVIEWER_CHECKLIST};

use crate::latex::ParsedDocument;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DocModelError {
    #[error("document `{0}` missing from store")]
    MissingDocument(String),
    #[error("anchor {0} does not resolve in document")]
    DanglingAnchor(String),
    #[error("stale version: expected {expected}, store has {current}")]
    StaleVersion { expected: u64, current: u64 },
    #[error("partitions overlap on document `{0}`")]
    OverlappingPartitions(String),
}

/// Entity categories. The declaration order is the fixed tie-break order
/// used wherever a single type must be chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityType {
    Task,
    Dataset,
    Metric,
    Model,
    Method,
    Setting,
    Score,
}

impl EntityType {
    pub const ALL: [EntityType; 7] = [
        EntityType::Task,
        EntityType::Dataset,
        EntityType::Metric,
        EntityType::Model,
        EntityType::Method,
        EntityType::Setting,
        EntityType::Score,
    ];

    /// Types that may appear in running text.
    pub const TEXT: [EntityType; 5] = [
        EntityType::Task,
        EntityType::Dataset,
        EntityType::Metric,
        EntityType::Model,
        EntityType::Method,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Task => "Task",
            EntityType::Dataset => "Dataset",
            EntityType::Metric => "Metric",
            EntityType::Model => "Model",
            EntityType::Method => "Method",
            EntityType::Setting => "Setting",
            EntityType::Score => "Score",
        }
    }

    pub fn is_text_type(self) -> bool {
        !matches!(self, EntityType::Setting | EntityType::Score)
    }

    /// Case-insensitive lookup of a type name.
    pub fn parse_loose(s: &str) -> Option<EntityType> {
        let s = s.trim();
        EntityType::ALL.into_iter().find(|t| t.as_str().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown entity type `{s}`"))
    }
}

/// Where an entity lives. Word ranges are half-open and 0-based; table
/// coordinates are 0-based `(row, col)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Anchor {
    Text { s: usize, l: usize, r: usize },
    Table { t: usize, i: usize, j: usize, l: usize, r: usize },
}

impl Anchor {
    pub fn word_range(&self) -> (usize, usize) {
        match *self {
            Anchor::Text { l, r, .. } | Anchor::Table { l, r, .. } => (l, r),
        }
    }

    pub fn table_index(&self) -> Option<usize> {
        match *self {
            Anchor::Table { t, .. } => Some(t),
            Anchor::Text { .. } => None,
        }
    }

    pub fn cell(&self) -> Option<(usize, usize)> {
        match *self {
            Anchor::Table { i, j, .. } => Some((i, j)),
            Anchor::Text { .. } => None,
        }
    }

    pub fn is_table(&self) -> bool {
        matches!(self, Anchor::Table { .. })
    }

    /// The anchored words, if the anchor resolves in `doc`.
    pub fn resolve<'d>(&self, doc: &'d ParsedDocument) -> Option<&'d [String]> {
        let (words, l, r) = match *self {
            Anchor::Text { s, l, r } => (doc.sentence(s)?, l, r),
            Anchor::Table { t, i, j, l, r } => (doc.tables.get(t)?.cell(i, j)?, l, r),
        };
        (l < r && r <= words.len()).then(|| &words[l..r])
    }

    /// Whole-cell span for table cell `(i, j)` with `len` words.
    pub fn whole_cell(t: usize, i: usize, j: usize, len: usize) -> Anchor {
        Anchor::Table { t, i, j, l: 0, r: len }
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Anchor::Text { s, l, r } => write!(f, "text(s={s}, {l}..{r})"),
            Anchor::Table { t, i, j, l, r } => write!(f, "table(t={t}, {i},{j}, {l}..{r})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub u64);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Auto,
    Mapped,
    Llm,
    Reviewed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: EntityId,
    pub anchor: Anchor,
    pub etype: EntityType,
    pub surface: String,
    pub provenance: Provenance,
}

impl Entity {
    /// Builds an entity whose surface is read from `doc`. Fails if the
    /// anchor does not resolve.
    pub fn new(
        doc: &ParsedDocument,
        id: EntityId,
        anchor: Anchor,
        etype: EntityType,
        provenance: Provenance,
    ) -> Result<Entity, DocModelError> {
        let words = anchor
            .resolve(doc)
            .ok_or_else(|| DocModelError::DanglingAnchor(anchor.to_string()))?;
        Ok(Entity {
            id,
            anchor,
            etype,
            surface: words.join(" "),
            provenance,
        })
    }

    pub fn normalized(&self) -> String {
        normalize_surface(&self.surface)
    }
}

/// An unordered, untyped link between two entities of one table. Stored
/// with `e1 < e2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TableRelation {
    pub e1: EntityId,
    pub e2: EntityId,
    pub table_idx: usize,
    pub provenance: Provenance,
}

impl TableRelation {
    pub fn new(a: EntityId, b: EntityId, table_idx: usize, provenance: Provenance) -> Self {
        let (e1, e2) = if a <= b { (a, b) } else { (b, a) };
        TableRelation {
            e1,
            e2,
            table_idx,
            provenance,
        }
    }

    pub fn key(&self) -> (EntityId, EntityId) {
        (self.e1, self.e2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReviewState {
    #[default]
    Unreviewed,
    InReview,
    Gold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedDocument {
    #[serde(default = "annotations_schema")]
    pub schema: String,
    pub doc: ParsedDocument,
    pub entities: Vec<Entity>,
    pub relations: Vec<TableRelation>,
    pub round_tag: u32,
    pub review_state: ReviewState,
    /// Optimistic-concurrency counter, bumped on every accepted write.
    #[serde(default)]
    pub version: u64,
}

fn annotations_schema() -> String {
    ANNOTATIONS_SCHEMA.to_string()
}

impl AnnotatedDocument {
    pub fn new(doc: ParsedDocument, round_tag: u32) -> Self {
        AnnotatedDocument {
            schema: annotations_schema(),
            doc,
            entities: Vec::new(),
            relations: Vec::new(),
            round_tag,
            review_state: ReviewState::Unreviewed,
            version: 0,
        }
    }

    pub fn doc_id(&self) -> &str {
        &self.doc.doc_id
    }

    pub fn next_entity_id(&self) -> EntityId {
        EntityId(self.entities.iter().map(|e| e.id.0 + 1).max().unwrap_or(0))
    }

    pub fn entity(&self, id: EntityId) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    /// Appends entities and relations produced with their own id space,
    /// renumbering both so ids stay unique in this document. Returns the
    /// old → new id mapping.
    pub fn absorb(
        &mut self,
        entities: Vec<Entity>,
        relations: Vec<TableRelation>,
    ) -> BTreeMap<EntityId, EntityId> {
        let mut mapping = BTreeMap::new();
        for (next, mut e) in (self.next_entity_id().0..).zip(entities) {
            let new_id = EntityId(next);
            mapping.insert(e.id, new_id);
            e.id = new_id;
            self.entities.push(e);
        }
        for rel in relations {
            if let (Some(&a), Some(&b)) = (mapping.get(&rel.e1), mapping.get(&rel.e2)) {
                self.relations.push(TableRelation::new(a, b, rel.table_idx, rel.provenance));
            }
        }
        mapping
    }

    pub fn text_entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.iter().filter(|e| !e.anchor.is_table())
    }

    pub fn table_entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.iter().filter(|e| e.anchor.is_table())
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("annotated document serializes")
    }
}
