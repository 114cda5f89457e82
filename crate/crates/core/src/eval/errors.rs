use super::{NerKey, Prf};
use crate::docmodel::{Anchor, EntityType};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A predicted item with a free-form label, so that labels outside the
/// type set can be counted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ErrorItem {
    pub doc: String,
    pub anchor: Anchor,
    pub label: String,
}

impl From<&NerKey> for ErrorItem {
    fn from(k: &NerKey) -> Self {
        ErrorItem { doc: k.doc.clone(), anchor: k.anchor, label: k.etype.as_str().to_string() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCounts {
    /// Gold entities with no exact prediction.
    pub missing: usize,
    /// Predictions on a boundary no gold entity has.
    pub unannotated: usize,
    /// Predictions on a gold boundary with another predefined type.
    pub incorrect_type: usize,
    /// Predictions whose type is outside the type set.
    pub undefined_type: usize,
    /// Parse issues carried over from the extractor.
    pub others: usize,
}

impl ErrorCounts {
    /// Whether the four match categories account for every false positive
    /// and false negative.
    pub fn reconciles(&self, prf: &Prf) -> bool {
        self.missing + self.unannotated + self.incorrect_type + self.undefined_type == prf.fp + prf.fn_
    }
}

/// Sorts every element of the symmetric difference of `gold` and `pred`
/// into one category. `parse_issues` lands in `others`.
pub fn categorize_errors(gold: &[NerKey], pred: &[ErrorItem], predefined: &[EntityType], parse_issues: usize) -> ErrorCounts {
    let gold: BTreeSet<&NerKey> = gold.iter().collect();
    let pred: BTreeSet<&ErrorItem> = pred.iter().collect();
    let boundaries: BTreeSet<(&str, Anchor)> = gold.iter().map(|k| (k.doc.as_str(), k.anchor)).collect();
    let typed = |p: &ErrorItem| {
        EntityType::ALL.into_iter().find(|t| t.as_str() == p.label).filter(|t| predefined.contains(t))
    };
    let mut c = ErrorCounts { others: parse_issues, ..Default::default() };
    let mut matched: BTreeSet<NerKey> = BTreeSet::new();
    for p in &pred {
        let Some(t) = typed(p) else {
            c.undefined_type += 1;
            continue;
        };
        let k = NerKey { doc: p.doc.clone(), anchor: p.anchor, etype: t };
        if gold.contains(&k) {
            matched.insert(k);
        } else if boundaries.contains(&(p.doc.as_str(), p.anchor)) {
            c.incorrect_type += 1;
        } else {
            c.unannotated += 1;
        }
    }
    c.missing = gold.len() - matched.len();
    c
}
