use super::{NerRequest, ReRequest, TableExtractor};
use crate::backend::{ExtractError, HttpJson};
use serde::Deserialize;
use serde_json::json;
use std::time::Duration;

pub const TABLE_NER_PATH: &str = "/v1/table/ner";
pub const TABLE_RE_PATH: &str = "/v1/table/re";

/// Client for an external table classifier.
#[derive(Debug)]
pub struct RemoteTableExtractor {
    http: HttpJson,
}

#[derive(Deserialize)]
struct NerResponse {
    probs: Vec<Vec<f64>>,
    /// Optional echo of the label order the probabilities refer to.
    #[serde(default)]
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct ReResponse {
    probs: Vec<f64>,
}

impl RemoteTableExtractor {
    pub fn new(endpoint: &str, max_in_flight: usize) -> Self {
        RemoteTableExtractor {
            http: HttpJson::new(endpoint, max_in_flight, Duration::from_secs(120)),
        }
    }
}

fn protocol(msg: String) -> ExtractError {
    ExtractError::BackendProtocol(msg)
}

impl TableExtractor for RemoteTableExtractor {
    fn ner_probs(&self, req: &NerRequest) -> Result<Vec<Vec<f64>>, ExtractError> {
        let labels: Vec<&str> = req.labels.iter().map(|l| l.as_str()).collect();
        let body = json!({
            "flat_table": req.flat.text,
            "coords": req.coords,
            "labels": labels,
        });
        let resp: NerResponse = serde_json::from_value(self.http.post(TABLE_NER_PATH, &body)?)
            .map_err(|e| protocol(format!("table NER response: {e}")))?;
        if let Some(echo) = &resp.labels {
            if let Some(bad) = echo.iter().find(|l| !labels.contains(&l.as_str())) {
                return Err(protocol(format!("label `{bad}` is not a table entity type")));
            }
            if echo.len() != labels.len() || echo.iter().zip(&labels).any(|(a, b)| a != b) {
                return Err(protocol("label order differs from the request".into()));
            }
        }
        if resp.probs.len() != req.coords.len() {
            return Err(protocol(format!("{} probability rows for {} cells", resp.probs.len(), req.coords.len())));
        }
        if let Some(row) = resp.probs.iter().find(|r| r.len() != labels.len()) {
            return Err(protocol(format!("probability row of length {} for {} labels", row.len(), labels.len())));
        }
        Ok(resp.probs)
    }

    fn re_probs(&self, req: &ReRequest) -> Result<Vec<f64>, ExtractError> {
        if req.pairs.is_empty() {
            return Ok(Vec::new());
        }
        let pairs: Vec<_> = req.pairs.iter().map(|p| (p.a, p.b)).collect();
        let body = json!({ "flat_table": req.flat.text, "pairs": pairs });
        let resp: ReResponse = serde_json::from_value(self.http.post(TABLE_RE_PATH, &body)?)
            .map_err(|e| protocol(format!("table RE response: {e}")))?;
        if resp.probs.len() != pairs.len() {
            return Err(protocol(format!("{} probabilities for {} pairs", resp.probs.len(), pairs.len())));
        }
        Ok(resp.probs)
    }
}
