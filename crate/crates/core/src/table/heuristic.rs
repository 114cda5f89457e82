use super::{CellPair, NerRequest, ReRequest, TableExtractor};
use super::statements::NerLabel;
use crate::backend::ExtractError;
use crate::docmodel::EntityType;
use crate::text::{gazetteer_key, Gazetteer};
use regex::Regex;
use std::sync::LazyLock;

static SCORE_CELL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d+(\.\d+)?(/\d+(\.\d+)?)?$").unwrap());

/// Built-in metric names, as gazetteer keys.
pub const METRIC_LEXICON: &[&str] = &[
    "f1", "f1-score", "f-score", "macro-f1", "micro-f1", "accuracy", "acc", "precision", "recall", "bleu", "rouge",
    "rouge-1", "rouge-2", "rouge-l", "em", "exact match", "perplexity", "ppl", "auc", "map", "mrr", "wer", "cer",
    "meteor", "cider", "spice", "top-1", "top-5", "ndcg", "miou", "psnr", "ssim", "mae", "rmse", "mse",
];

pub fn is_score_cell(text: &str) -> bool {
    SCORE_CELL.is_match(text.trim())
}

/// Rule-based table backend: numeric cells are Scores, other cells are
/// looked up in a gazetteer trained on gold table entities and then in the
/// metric lexicon. A Score is related to the entity heading its row (column
/// 0) and the entity heading its column (row 0).
#[derive(Debug, Clone, Default)]
pub struct HeuristicTableBackend {
    pub gazetteer: Gazetteer,
}

impl HeuristicTableBackend {
    pub fn new(gazetteer: Gazetteer) -> Self {
        HeuristicTableBackend { gazetteer }
    }

    pub fn classify(&self, text: &str) -> NerLabel {
        if text.trim().is_empty() {
            return NerLabel::None;
        }
        if is_score_cell(text) {
            return NerLabel::Entity(EntityType::Score);
        }
        if let Some(t) = self.gazetteer.lookup(text) {
            return NerLabel::Entity(t);
        }
        if METRIC_LEXICON.contains(&gazetteer_key(text).as_str()) {
            return NerLabel::Entity(EntityType::Metric);
        }
        NerLabel::None
    }

    pub fn related(pair: &CellPair) -> bool {
        let (score, other) = match (pair.a_type, pair.b_type) {
            (EntityType::Score, t) if t != EntityType::Score => (pair.a, pair.b),
            (t, EntityType::Score) if t != EntityType::Score => (pair.b, pair.a),
            _ => return false,
        };
        (other.1 == 0 && other.0 == score.0) || (other.0 == 0 && other.1 == score.1)
    }
}

impl TableExtractor for HeuristicTableBackend {
    fn ner_probs(&self, req: &NerRequest) -> Result<Vec<Vec<f64>>, ExtractError> {
        Ok(req
            .coords
            .iter()
            .map(|&(i, j)| {
                let label = self.classify(&req.grid.cell_text(i, j));
                let hit = if req.labels.contains(&label) { label } else { NerLabel::None };
                req.labels.iter().map(|l| if *l == hit { 1.0 } else { 0.0 }).collect()
            })
            .collect())
    }

    fn re_probs(&self, req: &ReRequest) -> Result<Vec<f64>, ExtractError> {
        Ok(req.pairs.iter().map(|p| if Self::related(p) { 1.0 } else { 0.0 }).collect())
    }
}
