use super::client::Completer;
use super::parse::{parse_table_ner, parse_table_re, parse_text_ner, ParseIssue};
use super::prompt::{build_prompt, render_sentences, render_table, LlmTask, DEFAULT_CONTEXT_CHARS};
use super::LlmError;
use crate::backend::ExtractError;
use crate::docmodel::{EntityType, Entity};
use crate::latex::ParsedDocument;
use crate::table::{canonical_pair, NerLabel, NerRequest, ReRequest, TableExtractor};
use crate::text::TextExtractor;
use rayon::prelude::*;
use std::ops::Range;
use std::sync::Mutex;

impl From<LlmError> for ExtractError {
    fn from(e: LlmError) -> Self {
        match e {
            LlmError::PayloadTooLarge { size, limit } => ExtractError::PayloadTooLarge { size, limit },
            other => ExtractError::BackendProtocol(other.to_string()),
        }
    }
}

/// Groups consecutive sentences into runs of at most `max_words` words.
/// A sentence longer than the limit gets a run of its own.
pub fn sentence_chunks(doc: &ParsedDocument, max_words: usize) -> Vec<Range<usize>> {
    let mut chunks = Vec::new();
    let mut start = 0;
    let mut words = 0;
    for (s, sent) in doc.sentences().iter().enumerate() {
        if s > start && words + sent.len() > max_words {
            chunks.push(start..s);
            start = s;
            words = 0;
        }
        words += sent.len();
    }
    let n = doc.sentence_count();
    if start < n {
        chunks.push(start..n);
    }
    chunks
}

/// Text NER by prompting, one independent request per sentence chunk.
pub struct LlmTextExtractor<C: Completer> {
    pub completer: C,
    pub shots: u8,
    pub chunk_words: usize,
    pub context_chars: usize,
    issues: Mutex<Vec<ParseIssue>>,
}

impl<C: Completer> LlmTextExtractor<C> {
    pub fn new(completer: C, shots: u8) -> Self {
        LlmTextExtractor {
            completer,
            shots,
            chunk_words: 256,
            context_chars: DEFAULT_CONTEXT_CHARS,
            issues: Mutex::new(Vec::new()),
        }
    }

    /// Parse issues gathered since the last call.
    pub fn take_issues(&self) -> Vec<ParseIssue> {
        std::mem::take(&mut *self.issues.lock().unwrap_or_else(|e| e.into_inner()))
    }
}

impl<C: Completer> TextExtractor for LlmTextExtractor<C> {
    fn extract_text(&self, doc: &ParsedDocument) -> Result<Vec<Entity>, ExtractError> {
        let sentences = doc.sentences();
        let results: Vec<Result<_, ExtractError>> = sentence_chunks(doc, self.chunk_words)
            .into_par_iter()
            .map(|range| {
                let payload = render_sentences(&sentences[range.clone()]);
                let prompt = build_prompt(LlmTask::TextNer, self.shots, &payload, false, self.context_chars)?;
                let answer = self.completer.complete(&prompt.text)?;
                Ok(parse_text_ner(&answer, doc, range))
            })
            .collect();
        let mut entities = Vec::new();
        for r in results {
            let parsed = r?;
            entities.extend(parsed.entities);
            self.issues.lock().unwrap_or_else(|e| e.into_inner()).extend(parsed.issues);
        }
        Ok(entities)
    }
}

/// Table NER and RE by prompting. Answers become one-hot probabilities so
/// the usual table pipeline applies unchanged.
pub struct LlmTableExtractor<C: Completer> {
    pub completer: C,
    pub shots: u8,
    pub context_chars: usize,
    issues: Mutex<Vec<ParseIssue>>,
}

impl<C: Completer> LlmTableExtractor<C> {
    pub fn new(completer: C, shots: u8) -> Self {
        LlmTableExtractor {
            completer,
            shots,
            context_chars: DEFAULT_CONTEXT_CHARS,
            issues: Mutex::new(Vec::new()),
        }
    }

    pub fn take_issues(&self) -> Vec<ParseIssue> {
        std::mem::take(&mut *self.issues.lock().unwrap_or_else(|e| e.into_inner()))
    }

    fn note(&self, issues: Vec<ParseIssue>) {
        self.issues.lock().unwrap_or_else(|e| e.into_inner()).extend(issues);
    }
}

impl<C: Completer> TableExtractor for LlmTableExtractor<C> {
    fn ner_probs(&self, req: &NerRequest) -> Result<Vec<Vec<f64>>, ExtractError> {
        let include_score = req.labels.contains(&NerLabel::Entity(EntityType::Score));
        let prompt = build_prompt(LlmTask::TableNer, self.shots, &render_table(req.grid), include_score, self.context_chars)?;
        let answer = self.completer.complete(&prompt.text)?;
        let parsed = parse_table_ner(&answer, req.grid, 0, include_score);
        let none = req.labels.iter().position(|l| *l == NerLabel::None).unwrap_or(0);
        let rows = req
            .coords
            .iter()
            .map(|&c| {
                let hit = parsed
                    .entities
                    .iter()
                    .filter(|e| e.anchor.cell() == Some(c))
                    .find_map(|e| req.labels.iter().position(|l| *l == NerLabel::Entity(e.etype)));
                let mut row = vec![0.0; req.labels.len()];
                row[hit.unwrap_or(none)] = 1.0;
                row
            })
            .collect();
        self.note(parsed.issues);
        Ok(rows)
    }

    fn re_probs(&self, req: &ReRequest) -> Result<Vec<f64>, ExtractError> {
        if req.pairs.is_empty() {
            return Ok(Vec::new());
        }
        let prompt = build_prompt(LlmTask::TableRe, self.shots, &render_table(req.grid), false, self.context_chars)?;
        let answer = self.completer.complete(&prompt.text)?;
        let parsed = parse_table_re(&answer, req.grid);
        let probs = req
            .pairs
            .iter()
            .map(|p| if parsed.relations.contains(&canonical_pair(p.a, p.b)) { 1.0 } else { 0.0 })
            .collect();
        self.note(parsed.issues);
        Ok(probs)
    }
}
