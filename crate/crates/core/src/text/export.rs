use super::windows::build_windows;
use crate::docmodel::{AnnotatedDocument, Anchor};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanRecord {
    pub l: usize,
    pub r: usize,
    #[serde(rename = "type")]
    pub etype: String,
}

/// One training example: a context window's tokens with the center
/// sentence's entities, offsets relative to `tokens`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowRecord {
    pub doc_id: String,
    /// Where the record came from, e.g. `round-2` or `scierc`.
    pub origin: String,
    pub tokens: Vec<String>,
    /// Half-open token range of the center sentence.
    pub center: (usize, usize),
    pub entities: Vec<SpanRecord>,
}

pub fn text_training_records(doc: &AnnotatedDocument, budget: usize, origin: &str) -> Vec<WindowRecord> {
    let sentences = doc.doc.sentences();
    build_windows(&doc.doc, budget)
        .into_iter()
        .map(|w| {
            let mut tokens = Vec::new();
            let mut center = (0, 0);
            for g in w.sentences.clone() {
                if g == w.center {
                    center = (tokens.len(), tokens.len() + sentences[g].len());
                }
                tokens.extend(sentences[g].iter().cloned());
            }
            let mut entities: Vec<SpanRecord> = doc
                .text_entities()
                .filter_map(|e| match e.anchor {
                    Anchor::Text { s, l, r } if s == w.center => Some(SpanRecord {
                        l: center.0 + l,
                        r: center.0 + r,
                        etype: e.etype.to_string(),
                    }),
                    _ => None,
                })
                .collect();
            entities.sort_by(|a, b| (a.l, a.r, &a.etype).cmp(&(b.l, b.r, &b.etype)));
            WindowRecord {
                doc_id: doc.doc_id().to_string(),
                origin: origin.to_string(),
                tokens,
                center,
                entities,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::{Entity, EntityId, EntityType, Provenance};
    use crate::latex::{split_words, DomainTag, ParsedDocument, Section};

    #[test]
    fn offsets_relative_to_window() {
        let mut d = ParsedDocument::new("d", DomainTag::Cs);
        d.sections.push(Section {
            title: String::new(),
            depth: 1,
            paragraphs: vec![vec![split_words("A b ."), split_words("We use BERT .")]],
        });
        let mut ad = AnnotatedDocument::new(d.clone(), 1);
        ad.entities.push(Entity::new(&d, EntityId(0), Anchor::Text { s: 1, l: 2, r: 3 }, EntityType::Model, Provenance::Reviewed).unwrap());
        let recs = text_training_records(&ad, 512, "round-1");
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].center, (3, 7));
        assert_eq!(recs[1].entities, vec![SpanRecord { l: 5, r: 6, etype: "Model".into() }]);
        assert_eq!(recs[1].tokens[5], "BERT");
        assert!(recs[0].entities.is_empty());
        let line = serde_json::to_string(&recs[1]).unwrap();
        assert!(line.contains(r#""entities":[{"l":5,"r":6,"type":"Model"}]"#));
    }
}
