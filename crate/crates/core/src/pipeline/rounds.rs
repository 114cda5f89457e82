use super::{PipelineError, Workspace};
use crate::docmodel::{AnnotatedDocument, PartitionName, ReviewState};
use crate::table::{table_training_instances, ScoreMode};
use crate::text::{text_training_records, Gazetteer, Modality, DEFAULT_WORD_BUDGET};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};

pub const TEXT_GAZETTEER: &str = "text_gazetteer.json";
pub const TABLE_GAZETTEER: &str = "table_gazetteer.json";
pub const TEXT_EXPORT: &str = "text_train.jsonl";
pub const TABLE_EXPORT: &str = "table_train.jsonl";

/// One training round: the gold documents trained on and hashes of what
/// was trained and exported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub index: u32,
    pub train_doc_ids: Vec<String>,
    /// Gold documents that entered training in this round.
    pub produced_gold: Vec<String>,
    /// File name → sha256 hex.
    pub extractor_snapshots: BTreeMap<String, String>,
}

fn jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        out.extend(serde_json::to_vec(&item).expect("record serializes"));
        out.push(b'\n');
    }
    out
}

/// Trains both gazetteers on `docs` and renders the training exports.
/// Returns file name → contents.
pub fn train_artifacts(docs: &[AnnotatedDocument]) -> Result<BTreeMap<&'static str, Vec<u8>>, PipelineError> {
    let text = Gazetteer::train(docs, Modality::Text).map_err(|e| PipelineError::Training(e.to_string()))?;
    let table = Gazetteer::train(docs, Modality::Table).map_err(|e| PipelineError::Training(e.to_string()))?;
    let mut files = BTreeMap::new();
    files.insert(TEXT_GAZETTEER, serde_json::to_vec_pretty(&text).expect("gazetteer serializes"));
    files.insert(TABLE_GAZETTEER, serde_json::to_vec_pretty(&table).expect("gazetteer serializes"));
    files.insert(TEXT_EXPORT, jsonl(docs.iter().flat_map(|d| text_training_records(d, DEFAULT_WORD_BUDGET, "pipeline"))));
    files.insert(TABLE_EXPORT, jsonl(docs.iter().flat_map(|d| table_training_instances(d, ScoreMode::WithScore))));
    Ok(files)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Starts the next round: every gold document outside the test partition
/// that the last round did not train on joins the training set, the
/// gazetteers are retrained and the exports regenerated. The first call
/// creates round 1 from the gold seeds.
pub fn advance_round(ws: &Workspace) -> Result<Round, PipelineError> {
    let mut rounds = ws.rounds()?;
    let prev: BTreeSet<String> = rounds.last().map(|r| r.train_doc_ids.iter().cloned().collect()).unwrap_or_default();
    let manifest = ws.manifest()?;
    let held_out = |id: &str| manifest.partition_of(id) == Some(PartitionName::Test);
    let all = ws.annotations()?;
    let new_gold: Vec<String> = all
        .iter()
        .filter(|d| d.review_state == ReviewState::Gold && !held_out(d.doc_id()) && !prev.contains(d.doc_id()))
        .map(|d| d.doc_id().to_string())
        .collect();
    if new_gold.is_empty() {
        return Err(PipelineError::NoNewGold);
    }
    let train: BTreeSet<String> = prev.into_iter().chain(new_gold.iter().cloned()).collect();
    let mut docs = Vec::with_capacity(train.len());
    for id in &train {
        let d = ws.load_annotation(id)?;
        if d.review_state != ReviewState::Gold {
            return Err(PipelineError::Training(format!("`{id}` is in the training set but no longer gold")));
        }
        docs.push(d);
    }

    let index = rounds.len() as u32 + 1;
    let dir = ws.round_dir(index);
    let mut snapshots = BTreeMap::new();
    for (name, bytes) in train_artifacts(&docs)? {
        let path = dir.join(name);
        super::workspace::write_atomic(&path, &bytes).map_err(|e| PipelineError::io(&path, e))?;
        snapshots.insert(name.to_string(), sha256_hex(&bytes));
    }
    let round = Round { index, train_doc_ids: train.into_iter().collect(), produced_gold: new_gold, extractor_snapshots: snapshots };
    rounds.push(round.clone());
    ws.save_rounds(&rounds)?;
    Ok(round)
}

/// The text and table gazetteers trained in round `index`.
pub fn load_gazetteers(ws: &Workspace, index: u32) -> Result<(Gazetteer, Gazetteer), PipelineError> {
    let dir = ws.round_dir(index);
    let read = |name: &str| -> Result<Gazetteer, PipelineError> {
        let p = dir.join(name);
        let bytes = std::fs::read(&p).map_err(|e| PipelineError::io(&p, e))?;
        serde_json::from_slice(&bytes).map_err(|e| PipelineError::Json(format!("{}: {e}", p.display())))
    };
    Ok((read(TEXT_GAZETTEER)?, read(TABLE_GAZETTEER)?))
}
