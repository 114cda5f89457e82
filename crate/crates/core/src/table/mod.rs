//! Table NER and relation extraction: flattening, classifier statements,
//! candidate pairs, label guiding and structural diagnostics.

mod diagnostics;
mod flatten;
mod guiding;
mod heuristic;
mod remote;
mod statements;

pub use diagnostics::{structure_diagnostics, Axis, Inconsistency, INCONSISTENCY_THRESHOLD};
pub use flatten::{flatten_table, FlatTable, CAP_MARK, ROW_MARK, SEP_MARK};
pub use guiding::{apply_label_guiding, guiding_conflicts, text_types};
pub use heuristic::{is_score_cell, HeuristicTableBackend, METRIC_LEXICON};
pub use remote::{RemoteTableExtractor, TABLE_NER_PATH, TABLE_RE_PATH};
pub use statements::{
    candidate_pairs, canonical_pair, gen_ner_statements, gen_ner_training, gen_re_statements, ner_labels, ner_statement,
    re_statement, NerLabel, PromptInstance, ScoreMode, Target,
};

use crate::backend::ExtractError;
use crate::docmodel::{Anchor, AnnotatedDocument, Entity, EntityId, EntityType, Provenance, TableRelation};
use crate::latex::TableGrid;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const DEFAULT_RE_THRESHOLD: f64 = 0.5;

/// Cells to classify, with the statements built for them.
pub struct NerRequest<'a> {
    pub grid: &'a TableGrid,
    pub flat: &'a FlatTable,
    /// Non-empty cells, row-major.
    pub coords: Vec<(usize, usize)>,
    pub labels: Vec<NerLabel>,
    pub statements: Vec<PromptInstance>,
}

/// Two typed cells of one table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellPair {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub a_type: EntityType,
    pub b_type: EntityType,
}

pub struct ReRequest<'a> {
    pub grid: &'a TableGrid,
    pub flat: &'a FlatTable,
    pub pairs: Vec<CellPair>,
    pub statements: Vec<PromptInstance>,
}

/// A table NER/RE backend. `ner_probs` returns one row per requested cell
/// with one probability per label; `re_probs` one probability per pair.
pub trait TableExtractor: Sync {
    fn ner_probs(&self, req: &NerRequest) -> Result<Vec<Vec<f64>>, ExtractError>;
    fn re_probs(&self, req: &ReRequest) -> Result<Vec<f64>, ExtractError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub mode: ScoreMode,
    pub re_threshold: f64,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            mode: ScoreMode::WithScore,
            re_threshold: DEFAULT_RE_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableExtraction {
    pub entities: Vec<Entity>,
    pub relations: Vec<TableRelation>,
}

/// Classifies every non-empty cell (argmax over the labels, None
/// dropped), aligns the result with the text through label guiding, then
/// classifies every cross-type pair of the guided entities. Guiding runs
/// before relation extraction so no relation ends up between two entities
/// that guiding made the same type. Entities are whole cells with ids
/// numbered from zero.
pub fn extract_table(
    grid: &TableGrid,
    table_idx: usize,
    text_entities: &[Entity],
    backend: &dyn TableExtractor,
    cfg: &TableConfig,
) -> Result<TableExtraction, ExtractError> {
    let entities = classify_cells(grid, table_idx, backend, cfg)?;
    let entities = apply_label_guiding(text_entities, entities);
    let relations = relate_cells(grid, table_idx, &entities, backend, cfg)?;
    Ok(TableExtraction { entities, relations })
}

/// The NER half of [`extract_table`], without guiding.
pub fn classify_cells(
    grid: &TableGrid,
    table_idx: usize,
    backend: &dyn TableExtractor,
    cfg: &TableConfig,
) -> Result<Vec<Entity>, ExtractError> {
    let flat = flatten_table(grid);
    let labels = ner_labels(cfg.mode);
    let coords: Vec<(usize, usize)> = grid.coords().filter(|&(i, j)| grid.cell(i, j).is_some_and(|c| !c.is_empty())).collect();
    if coords.is_empty() {
        return Ok(Vec::new());
    }
    let statements: Vec<PromptInstance> = gen_ner_statements(grid, cfg.mode)
        .into_iter()
        .filter(|p| matches!(p.target, Target::Cell { i, j, .. } if coords.binary_search(&(i, j)).is_ok()))
        .collect();
    let req = NerRequest { grid, flat: &flat, coords, labels, statements };
    let probs = backend.ner_probs(&req)?;
    if probs.len() != req.coords.len() || probs.iter().any(|r| r.len() != req.labels.len()) {
        return Err(ExtractError::BackendProtocol("NER probabilities do not match the request shape".into()));
    }

    let mut entities = Vec::new();
    for (&(i, j), row) in req.coords.iter().zip(&probs) {
        let best = argmax(row);
        let Some(etype) = req.labels[best].entity_type() else { continue };
        let len = grid.cell(i, j).map_or(0, Vec::len);
        let anchor = Anchor::Table { t: table_idx, i, j, l: 0, r: len };
        entities.push(Entity {
            id: EntityId(entities.len() as u64),
            anchor,
            etype,
            surface: grid.cell_text(i, j),
            provenance: Provenance::Auto,
        });
    }
    Ok(entities)
}

/// The RE half of [`extract_table`]: relations among the cross-type pairs
/// of `entities` scoring at least the threshold.
pub fn relate_cells(
    grid: &TableGrid,
    table_idx: usize,
    entities: &[Entity],
    backend: &dyn TableExtractor,
    cfg: &TableConfig,
) -> Result<Vec<TableRelation>, ExtractError> {
    let flat = flatten_table(grid);
    let idx_pairs = candidate_pairs(entities);
    let pairs: Vec<CellPair> = idx_pairs
        .iter()
        .map(|&(a, b)| {
            let (ea, eb) = (&entities[a], &entities[b]);
            CellPair {
                a: ea.anchor.cell().expect("table anchor"),
                b: eb.anchor.cell().expect("table anchor"),
                a_type: ea.etype,
                b_type: eb.etype,
            }
        })
        .collect();
    let coord_pairs: Vec<_> = pairs.iter().map(|p| (p.a, p.b)).collect();
    let req = ReRequest { grid, flat: &flat, statements: gen_re_statements(grid, &coord_pairs), pairs };
    let rel_probs = if req.pairs.is_empty() { Vec::new() } else { backend.re_probs(&req)? };
    if rel_probs.len() != req.pairs.len() {
        return Err(ExtractError::BackendProtocol("RE probabilities do not match the pair count".into()));
    }
    Ok(idx_pairs
        .iter()
        .zip(rel_probs)
        .filter(|(_, p)| *p >= cfg.re_threshold)
        .map(|(&(a, b), _)| TableRelation::new(entities[a].id, entities[b].id, table_idx, Provenance::Auto))
        .collect())
}

/// Index of the largest value; the earliest wins ties.
fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in row.iter().enumerate() {
        if *v > row[best] {
            best = k;
        }
    }
    best
}

/// Classifier training instances for every table of a gold document: NER
/// statements with positive/negative labels, then RE statements over the
/// cross-type pairs of the gold entities with `1` for related pairs.
pub fn table_training_instances(doc: &AnnotatedDocument, mode: ScoreMode) -> Vec<PromptInstance> {
    let mut out = Vec::new();
    for (t, grid) in doc.doc.tables.iter().enumerate() {
        let ents: Vec<Entity> = doc
            .table_entities()
            .filter(|e| e.anchor.table_index() == Some(t))
            .filter(|e| mode == ScoreMode::WithScore || e.etype != EntityType::Score)
            .cloned()
            .collect();
        let gold: BTreeMap<(usize, usize), EntityType> =
            ents.iter().filter_map(|e| e.anchor.cell().map(|c| (c, e.etype))).collect();
        out.extend(gen_ner_training(grid, &gold, mode));
        let related: BTreeSet<(EntityId, EntityId)> = doc
            .relations
            .iter()
            .filter(|r| r.table_idx == t)
            .map(|r| r.key())
            .collect();
        for (a, b) in candidate_pairs(&ents) {
            let (ea, eb) = (&ents[a], &ents[b]);
            let key = TableRelation::new(ea.id, eb.id, t, Provenance::Auto).key();
            let mut inst = gen_re_statements(grid, &[(ea.anchor.cell().unwrap(), eb.anchor.cell().unwrap())]).remove(0);
            let (pos, neg) = if related.contains(&key) { ("1", "0") } else { ("0", "1") };
            inst.positive = Some(pos.into());
            inst.negatives = vec![neg.into()];
            out.push(inst);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::mock;

    fn grid() -> TableGrid {
        TableGrid::from_strings("Results", &[vec!["System", "F1"], vec!["BERT", "92.2"]])
    }

    #[test]
    fn heuristic_example() {
        let mut g = crate::text::Gazetteer::new();
        g.add("BERT", EntityType::Model);
        let backend = HeuristicTableBackend::new(g);
        let out = extract_table(&grid(), 0, &[], &backend, &TableConfig::default()).unwrap();
        let got: Vec<_> = out.entities.iter().map(|e| (e.surface.as_str(), e.etype, e.anchor.cell().unwrap())).collect();
        assert_eq!(
            got,
            vec![
                ("F1", EntityType::Metric, (0, 1)),
                ("BERT", EntityType::Model, (1, 0)),
                ("92.2", EntityType::Score, (1, 1)),
            ]
        );
        let rels: Vec<_> = out.relations.iter().map(|r| r.key()).collect();
        assert_eq!(rels, vec![(EntityId(0), EntityId(2)), (EntityId(1), EntityId(2))]);
    }

    #[test]
    fn without_score_drops_scores() {
        let backend = HeuristicTableBackend::default();
        let cfg = TableConfig { mode: ScoreMode::WithoutScore, ..Default::default() };
        let out = extract_table(&grid(), 0, &[], &backend, &cfg).unwrap();
        assert!(out.entities.iter().all(|e| e.etype != EntityType::Score));
    }

    #[test]
    fn empty_rows_yield_nothing() {
        let g = TableGrid::from_strings("", &[vec!["", ""]]);
        let out = extract_table(&g, 0, &[], &HeuristicTableBackend::default(), &TableConfig::default()).unwrap();
        assert!(out.entities.is_empty() && out.relations.is_empty());
    }

    #[test]
    fn remote_author_label_is_protocol_error() {
        let srv = mock::serve(|path, body| {
            if path == TABLE_NER_PATH {
                let n = body["coords"].as_array().unwrap().len();
                let mut labels: Vec<String> = body["labels"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
                labels[0] = "Author".into();
                (200, serde_json::json!({"probs": vec![vec![0.0; 8]; n], "labels": labels}).to_string())
            } else {
                (404, String::new())
            }
        });
        let r = RemoteTableExtractor::new(&srv.url, 1);
        let err = extract_table(&grid(), 0, &[], &r, &TableConfig::default()).unwrap_err();
        assert!(matches!(err, ExtractError::BackendProtocol(ref m) if m.contains("Author")), "{err:?}");
    }

    #[test]
    fn remote_round_trip() {
        let srv = mock::serve(|path, body| {
            if path == TABLE_NER_PATH {
                let coords = body["coords"].as_array().unwrap();
                let probs: Vec<Vec<f64>> = coords
                    .iter()
                    .map(|c| {
                        let mut p = vec![0.0; 8];
                        // (1,0) Model, (1,1) Score, others None.
                        match (c[0].as_u64().unwrap(), c[1].as_u64().unwrap()) {
                            (1, 0) => p[3] = 0.9,
                            (1, 1) => p[6] = 0.8,
                            _ => p[7] = 0.7,
                        }
                        p
                    })
                    .collect();
                (200, serde_json::json!({ "probs": probs }).to_string())
            } else {
                let n = body["pairs"].as_array().unwrap().len();
                (200, serde_json::json!({ "probs": vec![0.6; n] }).to_string())
            }
        });
        let r = RemoteTableExtractor::new(&srv.url, 2);
        let out = extract_table(&grid(), 3, &[], &r, &TableConfig::default()).unwrap();
        assert_eq!(out.entities.len(), 2);
        assert_eq!(out.relations.len(), 1);
        assert_eq!(out.relations[0].table_idx, 3);
        let reqs = srv.requests.lock().unwrap();
        assert_eq!(reqs[1].1["pairs"], serde_json::json!([[[1, 0], [1, 1]]]));
    }

    #[test]
    fn training_instances() {
        let g = grid();
        let mut doc = crate::latex::ParsedDocument::new("d", crate::latex::DomainTag::Cs);
        doc.tables.push(g);
        let mut ad = AnnotatedDocument::new(doc, 1);
        let backend = HeuristicTableBackend::new({
            let mut gz = crate::text::Gazetteer::new();
            gz.add("BERT", EntityType::Model);
            gz
        });
        let out = extract_table(&ad.doc.tables[0], 0, &[], &backend, &TableConfig::default()).unwrap();
        ad.absorb(out.entities, out.relations);
        let inst = table_training_instances(&ad, ScoreMode::WithScore);
        // 4 cells × 8 labels, then 3 cross-type pairs.
        assert_eq!(inst.len(), 35);
        let re: Vec<_> = inst[32..].iter().map(|p| p.positive.clone().unwrap()).collect();
        assert_eq!(re, vec!["0", "1", "1"]);
    }
}
