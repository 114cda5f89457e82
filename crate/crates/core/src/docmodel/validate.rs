use super::{fold_surface, AnnotatedDocument, Anchor, DETERMINERS, GENERIC_HEADS};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Severity {
    Warning,
    Error,
}

/// Which guideline or structural rule a finding comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleId {
    /// Anchor does not resolve in the document.
    DanglingAnchor,
    /// Stored surface differs from the anchored words.
    SurfaceMismatch,
    /// Setting/Score anchored in running text.
    Modality,
    /// Relation endpoint missing or not anchored in the relation's table.
    RelationEndpoint,
    /// Relation endpoints in different tables.
    CrossTable,
    /// Generic heads at span edges.
    Rule4,
    /// Broad, unspecific noun phrase.
    Rule5,
    /// Leading determiner or adjective pronoun.
    Rule7,
    /// Relation between two entities of the same type.
    Rule8,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("rule id serializes");
        f.write_str(s.as_str().unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Finding {
    pub rule_id: RuleId,
    pub severity: Severity,
    pub anchor: Option<Anchor>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Phrases too broad to be entities.
const VAGUE_SURFACES: &[&str] = &[
    "neural network",
    "neural networks",
    "encoder-decoder architecture",
    "deep neural network",
    "deep neural networks",
    "deep learning model",
];

/// Checks a document against the structural rules (errors) and the
/// lexical annotation guidelines (warnings). Findings are sorted, so the
/// report does not depend on entity order.
pub fn validate(doc: &AnnotatedDocument) -> ValidationReport {
    let mut findings = Vec::new();
    for e in &doc.entities {
        let anchor = Some(e.anchor);
        match e.anchor.resolve(&doc.doc) {
            None => findings.push(Finding {
                rule_id: RuleId::DanglingAnchor,
                severity: Severity::Error,
                anchor,
                message: format!("{} {} does not resolve", e.id, e.anchor),
            }),
            Some(words) if words.join(" ") != e.surface => findings.push(Finding {
                rule_id: RuleId::SurfaceMismatch,
                severity: Severity::Error,
                anchor,
                message: format!("{}: surface `{}` != anchored `{}`", e.id, e.surface, words.join(" ")),
            }),
            Some(_) => {}
        }
        if !e.anchor.is_table() && !e.etype.is_text_type() {
            findings.push(Finding {
                rule_id: RuleId::Modality,
                severity: Severity::Error,
                anchor,
                message: format!("{}: {} entities only occur in tables", e.id, e.etype),
            });
        }
        lexical_findings(&e.surface, e.anchor, &mut findings);
    }

    let by_id: HashMap<_, _> = doc.entities.iter().map(|e| (e.id, e)).collect();
    for rel in &doc.relations {
        let (Some(a), Some(b)) = (by_id.get(&rel.e1), by_id.get(&rel.e2)) else {
            findings.push(Finding {
                rule_id: RuleId::RelationEndpoint,
                severity: Severity::Error,
                anchor: None,
                message: format!("relation {}-{} references a missing entity", rel.e1, rel.e2),
            });
            continue;
        };
        match (a.anchor.table_index(), b.anchor.table_index()) {
            (Some(ta), Some(tb)) if ta != tb => findings.push(Finding {
                rule_id: RuleId::CrossTable,
                severity: Severity::Error,
                anchor: Some(a.anchor),
                message: format!("relation {}-{} spans tables {ta} and {tb}", rel.e1, rel.e2),
            }),
            (Some(ta), Some(_)) if ta != rel.table_idx => findings.push(Finding {
                rule_id: RuleId::RelationEndpoint,
                severity: Severity::Error,
                anchor: Some(a.anchor),
                message: format!("relation {}-{} filed under table {} but anchored in {ta}", rel.e1, rel.e2, rel.table_idx),
            }),
            (Some(_), Some(_)) => {}
            _ => findings.push(Finding {
                rule_id: RuleId::RelationEndpoint,
                severity: Severity::Error,
                anchor: Some(a.anchor),
                message: format!("relation {}-{} has a text-anchored endpoint", rel.e1, rel.e2),
            }),
        }
        if a.etype == b.etype {
            findings.push(Finding {
                rule_id: RuleId::Rule8,
                severity: Severity::Error,
                anchor: Some(a.anchor),
                message: format!("two {} entities should not have a relationship", a.etype),
            });
        }
    }
    findings.sort();
    ValidationReport { findings }
}

fn lexical_findings(surface: &str, anchor: Anchor, findings: &mut Vec<Finding>) {
    let words: Vec<&str> = surface.split_whitespace().collect();
    let lower: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
    if words.len() > 1 && DETERMINERS.contains(&lower[0].as_str()) {
        findings.push(Finding {
            rule_id: RuleId::Rule7,
            severity: Severity::Warning,
            anchor: Some(anchor),
            message: format!("`{surface}` starts with determiner `{}`; suggest `{}`", words[0], words[1..].join(" ")),
        });
    }
    if words.len() > 1 {
        let mut start = 0;
        let mut end = words.len();
        while end - start > 1 && GENERIC_HEADS.contains(&lower[start].as_str()) {
            start += 1;
        }
        while end - start > 1 && GENERIC_HEADS.contains(&lower[end - 1].as_str()) {
            end -= 1;
        }
        if (start, end) != (0, words.len()) {
            findings.push(Finding {
                rule_id: RuleId::Rule4,
                severity: Severity::Warning,
                anchor: Some(anchor),
                message: format!("`{surface}` has a generic head; suggest `{}`", words[start..end].join(" ")),
            });
        }
    }
    if VAGUE_SURFACES.contains(&fold_surface(surface).as_str()) {
        findings.push(Finding {
            rule_id: RuleId::Rule5,
            severity: Severity::Warning,
            anchor: Some(anchor),
            message: format!("`{surface}` is too broad to be an entity"),
        });
    }
}

/// Human-judgment guideline rules, shown to reviewers as a checklist.
pub const REVIEWER_CHECKLIST: &[&str] = &[
    "Model vs Method: a Model can be applied to a task on its own; a Method helps models improve but cannot solve a task directly.",
    "A proposed framework that stacks several models is a Model.",
    "A combination of a Model and a Method (e.g. an RNN-based encoder) is a Method.",
    "Drop domain-unrelated adjectives such as \"state-of-the-art\"; keep specific ones such as \"Bidirectional\".",
];
