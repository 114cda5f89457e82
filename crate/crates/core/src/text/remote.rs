use super::windows::{build_windows, DEFAULT_WORD_BUDGET};
use super::TextExtractor;
use crate::backend::{ExtractError, HttpJson};
use crate::docmodel::{Anchor, Entity, EntityId, EntityType, Provenance};
use crate::latex::ParsedDocument;
use serde::Deserialize;
use serde_json::json;
use std::collections::BTreeSet;
use std::time::Duration;

pub const TEXT_EXTRACT_PATH: &str = "/v1/extract/text";

/// Client for an external span extractor. Windows are sent in batches;
/// the `s` of each returned entity indexes the batch's sentences
/// concatenated window by window, and only entities in a window's center
/// sentence are kept.
#[derive(Debug)]
pub struct RemoteTextExtractor {
    http: HttpJson,
    pub batch_size: usize,
    pub word_budget: usize,
}

#[derive(Deserialize)]
struct WireEntity {
    s: usize,
    l: usize,
    r: usize,
    #[serde(rename = "type")]
    etype: String,
    #[serde(default)]
    #[allow(dead_code)]
    score: Option<f64>,
}

#[derive(Deserialize)]
struct WireResponse {
    entities: Vec<WireEntity>,
}

impl RemoteTextExtractor {
    pub fn new(endpoint: &str, max_in_flight: usize) -> Self {
        RemoteTextExtractor {
            http: HttpJson::new(endpoint, max_in_flight, Duration::from_secs(120)),
            batch_size: 32,
            word_budget: DEFAULT_WORD_BUDGET,
        }
    }
}

impl TextExtractor for RemoteTextExtractor {
    fn extract_text(&self, doc: &ParsedDocument) -> Result<Vec<Entity>, ExtractError> {
        let sentences = doc.sentences();
        let windows = build_windows(doc, self.word_budget);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for chunk in windows.chunks(self.batch_size.max(1)) {
            let body = json!({
                "windows": chunk.iter().map(|w| json!({
                    "sentences": w.sentences.clone().map(|i| sentences[i]).collect::<Vec<_>>(),
                    "center": w.center_offset(),
                })).collect::<Vec<_>>()
            });
            let resp: WireResponse = serde_json::from_value(self.http.post(TEXT_EXTRACT_PATH, &body)?)
                .map_err(|e| ExtractError::BackendProtocol(format!("text response: {e}")))?;
            // Flattened sentence index → (global sentence, is center).
            let flat: Vec<(usize, bool)> = chunk
                .iter()
                .flat_map(|w| w.sentences.clone().map(move |g| (g, g == w.center)))
                .collect();
            for we in resp.entities {
                let &(global, is_center) = flat
                    .get(we.s)
                    .ok_or_else(|| ExtractError::BackendProtocol(format!("sentence index {} out of range", we.s)))?;
                let etype = EntityType::TEXT
                    .into_iter()
                    .find(|t| t.as_str() == we.etype)
                    .ok_or_else(|| ExtractError::BackendProtocol(format!("type `{}` outside the text schema", we.etype)))?;
                if we.l >= we.r || we.r > sentences[global].len() {
                    return Err(ExtractError::BackendProtocol(format!("span {}..{} outside sentence {global}", we.l, we.r)));
                }
                let anchor = Anchor::Text { s: global, l: we.l, r: we.r };
                if is_center && seen.insert((anchor, etype)) {
                    let id = EntityId(out.len() as u64);
                    let e = Entity::new(doc, id, anchor, etype, Provenance::Auto)
                        .map_err(|e| ExtractError::BackendProtocol(e.to_string()))?;
                    out.push(e);
                }
            }
        }
        Ok(out)
    }
}
