use super::flatten::{flatten_table, FlatTable};
use crate::docmodel::{Entity, EntityType};
use crate::latex::TableGrid;
use crate::llm::CellPairCoords;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Whether Score is among the table NER labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMode {
    #[default]
    WithScore,
    WithoutScore,
}

/// A table NER class: an entity type or the non-entity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NerLabel {
    Entity(EntityType),
    None,
}

impl NerLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            NerLabel::Entity(t) => t.as_str(),
            NerLabel::None => "None",
        }
    }

    pub fn entity_type(self) -> Option<EntityType> {
        match self {
            NerLabel::Entity(t) => Some(t),
            NerLabel::None => None,
        }
    }
}

impl fmt::Display for NerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The candidate set: all seven types (six without Score) plus None.
pub fn ner_labels(mode: ScoreMode) -> Vec<NerLabel> {
    EntityType::ALL
        .into_iter()
        .filter(|t| mode == ScoreMode::WithScore || *t != EntityType::Score)
        .map(NerLabel::Entity)
        .chain([NerLabel::None])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Target {
    Cell { i: usize, j: usize, label: NerLabel },
    Pair { a: (usize, usize), b: (usize, usize) },
}

/// One classifier statement with its table and labels. `positive` and
/// `negatives` are only filled for training instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PromptInstance {
    pub statement: String,
    #[serde(serialize_with = "flat_text")]
    pub table: Arc<FlatTable>,
    pub target: Target,
    pub candidates: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub negatives: Vec<String>,
}

fn flat_text<S: Serializer>(t: &Arc<FlatTable>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&t.text)
}

/// Statement for cell `(i, j)` (0-based) and label `label`; the text uses
/// 1-based indices.
pub fn ner_statement(cell: &str, i: usize, j: usize, label: NerLabel) -> String {
    format!("The entity type of the cell {cell}, in row {}, column {} is {label}.", i + 1, j + 1)
}

pub fn re_statement(a_text: &str, a: (usize, usize), b_text: &str, b: (usize, usize)) -> String {
    format!(
        "Whether the cell {a_text}, located in row {}, column {}, has a relation with the cell {b_text}, located in row {}, column {}, or not?",
        a.0 + 1,
        a.1 + 1,
        b.0 + 1,
        b.1 + 1
    )
}

/// One statement per (cell, candidate label), row-major, labels in
/// candidate order.
pub fn gen_ner_statements(grid: &TableGrid, mode: ScoreMode) -> Vec<PromptInstance> {
    let table = Arc::new(flatten_table(grid));
    let labels = ner_labels(mode);
    let candidates: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    grid.coords()
        .flat_map(|(i, j)| {
            let text = grid.cell_text(i, j);
            let table = Arc::clone(&table);
            let candidates = candidates.clone();
            labels.clone().into_iter().map(move |label| PromptInstance {
                statement: ner_statement(&text, i, j, label),
                table: Arc::clone(&table),
                target: Target::Cell { i, j, label },
                candidates: candidates.clone(),
                positive: None,
                negatives: Vec::new(),
            })
        })
        .collect()
}

/// Training instances: for every cell, one instance per label statement,
/// each carrying the cell's true label as positive and the other m − 1
/// labels as negatives. Cells missing from `gold` are None; in
/// without-Score mode gold Score cells become None.
pub fn gen_ner_training(grid: &TableGrid, gold: &BTreeMap<(usize, usize), EntityType>, mode: ScoreMode) -> Vec<PromptInstance> {
    let labels = ner_labels(mode);
    gen_ner_statements(grid, mode)
        .into_iter()
        .map(|mut inst| {
            let Target::Cell { i, j, .. } = inst.target else { unreachable!() };
            let truth = gold
                .get(&(i, j))
                .map(|t| NerLabel::Entity(*t))
                .filter(|l| labels.contains(l))
                .unwrap_or(NerLabel::None);
            inst.positive = Some(truth.to_string());
            inst.negatives = labels.iter().filter(|l| **l != truth).map(|l| l.to_string()).collect();
            inst
        })
        .collect()
}

/// All unordered pairs of entities with different types, as index pairs
/// `(a, b)` with `a < b` into `entities`.
pub fn candidate_pairs(entities: &[Entity]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..entities.len() {
        for b in a + 1..entities.len() {
            if entities[a].etype != entities[b].etype {
                out.push((a, b));
            }
        }
    }
    out
}

/// Orders a coordinate pair row-major, lower coordinate first.
pub fn canonical_pair(a: (usize, usize), b: (usize, usize)) -> ((usize, usize), (usize, usize)) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// One binary statement per coordinate pair, candidates `0`/`1`.
pub fn gen_re_statements(grid: &TableGrid, pairs: &[CellPairCoords]) -> Vec<PromptInstance> {
    let table = Arc::new(flatten_table(grid));
    pairs
        .iter()
        .map(|&(a, b)| {
            let (a, b) = canonical_pair(a, b);
            PromptInstance {
                statement: re_statement(&grid.cell_text(a.0, a.1), a, &grid.cell_text(b.0, b.1), b),
                table: Arc::clone(&table),
                target: Target::Pair { a, b },
                candidates: vec!["0".into(), "1".into()],
                positive: None,
                negatives: Vec::new(),
            }
        })
        .collect()
}
