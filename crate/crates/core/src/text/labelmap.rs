//! Re-typing annotations from external benchmark schemas.

use crate::docmodel::{Anchor, Entity, EntityId, EntityType, Provenance};
use crate::latex::{DomainTag, ParsedDocument, Section};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SourceSchema {
    SciERC,
    SciREX,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LabelMapError {
    #[error("unknown {schema:?} type `{label}`")]
    UnknownSourceType { schema: SourceSchema, label: String },
    #[error("span {0} does not resolve")]
    BadSpan(String),
    #[error("malformed {0:?} record: {1}")]
    Malformed(SourceSchema, String),
}

/// Source type name → target type, `None` meaning drop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMapSpec {
    pub source_schema: SourceSchema,
    pub mapping: BTreeMap<String, Option<EntityType>>,
}

impl LabelMapSpec {
    pub fn scierc() -> Self {
        let mapping = [
            ("Task", Some(EntityType::Task)),
            ("Metric", Some(EntityType::Metric)),
            ("Method", Some(EntityType::Method)),
            ("Material", None),
            ("OtherScientificTerm", None),
            ("Generic", None),
        ];
        Self::from_pairs(SourceSchema::SciERC, &mapping)
    }

    /// SciREX calls datasets "Material".
    pub fn scirex() -> Self {
        let mapping = [
            ("Task", Some(EntityType::Task)),
            ("Method", Some(EntityType::Method)),
            ("Metric", Some(EntityType::Metric)),
            ("Material", Some(EntityType::Dataset)),
            ("Dataset", Some(EntityType::Dataset)),
        ];
        Self::from_pairs(SourceSchema::SciREX, &mapping)
    }

    pub fn for_schema(schema: SourceSchema) -> Self {
        match schema {
            SourceSchema::SciERC => Self::scierc(),
            SourceSchema::SciREX => Self::scirex(),
        }
    }

    fn from_pairs(source_schema: SourceSchema, pairs: &[(&str, Option<EntityType>)]) -> Self {
        LabelMapSpec {
            source_schema,
            mapping: pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// One span from an external corpus, in sentence/word coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalSpan {
    pub s: usize,
    pub l: usize,
    pub r: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalDoc {
    pub doc: ParsedDocument,
    pub spans: Vec<ExternalSpan>,
}

impl ExternalDoc {
    /// Reads one SciERC JSON line: `sentences` are token lists and `ner`
    /// holds, per sentence, `[start, end, label]` with document-level,
    /// inclusive token offsets.
    pub fn from_scierc(line: &str) -> Result<ExternalDoc, LabelMapError> {
        #[derive(Deserialize)]
        struct Raw {
            doc_key: String,
            sentences: Vec<Vec<String>>,
            #[serde(default)]
            ner: Vec<Vec<(usize, usize, String)>>,
        }
        let bad = |e: String| LabelMapError::Malformed(SourceSchema::SciERC, e);
        let raw: Raw = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let mut spans = Vec::new();
        let mut offset = 0;
        for (s, sent) in raw.sentences.iter().enumerate() {
            for (start, end, label) in raw.ner.get(s).into_iter().flatten() {
                if *start < offset || *end < *start || end - offset >= sent.len() {
                    return Err(bad(format!("span {start}..={end} outside sentence {s}")));
                }
                spans.push(ExternalSpan {
                    s,
                    l: start - offset,
                    r: end - offset + 1,
                    label: label.clone(),
                });
            }
            offset += sent.len();
        }
        Ok(ExternalDoc {
            doc: doc_from_sentences(&raw.doc_key, raw.sentences),
            spans,
        })
    }

    /// Reads one SciREX JSON line: flat `words`, `sentences` as
    /// `[start, end)` word ranges and `ner` as `[start, end, label]` with
    /// exclusive ends.
    pub fn from_scirex(line: &str) -> Result<ExternalDoc, LabelMapError> {
        #[derive(Deserialize)]
        struct Raw {
            doc_id: String,
            words: Vec<String>,
            sentences: Vec<(usize, usize)>,
            #[serde(default)]
            ner: Vec<(usize, usize, String)>,
        }
        let bad = |e: String| LabelMapError::Malformed(SourceSchema::SciREX, e);
        let raw: Raw = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let mut sentences = Vec::new();
        for &(a, b) in &raw.sentences {
            let words = raw.words.get(a..b).ok_or_else(|| bad(format!("sentence {a}..{b}")))?;
            sentences.push(words.to_vec());
        }
        let mut spans = Vec::new();
        for (start, end, label) in raw.ner {
            let s = raw
                .sentences
                .iter()
                .position(|&(a, b)| a <= start && end <= b && start < end)
                .ok_or_else(|| bad(format!("span {start}..{end} crosses sentences")))?;
            let base = raw.sentences[s].0;
            spans.push(ExternalSpan { s, l: start - base, r: end - base, label });
        }
        Ok(ExternalDoc {
            doc: doc_from_sentences(&raw.doc_id, sentences),
            spans,
        })
    }
}

fn doc_from_sentences(id: &str, sentences: Vec<Vec<String>>) -> ParsedDocument {
    let mut doc = ParsedDocument::new(id, DomainTag::Cs);
    doc.sections.push(Section {
        title: String::new(),
        depth: 1,
        paragraphs: vec![sentences],
    });
    doc
}

/// Keeps spans whose source type maps to a text type, re-typed, with
/// provenance `mapped`. Unknown source types fail in strict mode and are
/// skipped with a warning otherwise.
pub fn map_labels(ext: &ExternalDoc, spec: &LabelMapSpec, strict: bool) -> Result<Vec<Entity>, LabelMapError> {
    let mut out = Vec::new();
    for span in &ext.spans {
        let target = match spec.mapping.get(&span.label) {
            Some(t) => *t,
            None if strict => {
                return Err(LabelMapError::UnknownSourceType {
                    schema: spec.source_schema,
                    label: span.label.clone(),
                })
            }
            None => {
                log::warn!("{}: skipping unknown {:?} type `{}`", ext.doc.doc_id, spec.source_schema, span.label);
                None
            }
        };
        let Some(etype) = target.filter(|t| t.is_text_type()) else {
            continue;
        };
        let anchor = Anchor::Text { s: span.s, l: span.l, r: span.r };
        let id = EntityId(out.len() as u64);
        let e = Entity::new(&ext.doc, id, anchor, etype, Provenance::Mapped)
            .map_err(|_| LabelMapError::BadSpan(anchor.to_string()))?;
        out.push(e);
    }
    Ok(out)
}
