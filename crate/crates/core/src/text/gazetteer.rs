use super::TextError;
use crate::backend::ExtractError;
use crate::docmodel::{normalize_surface, Anchor, AnnotatedDocument, Entity, EntityId, EntityType, Provenance, ReviewState};
use crate::latex::ParsedDocument;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

const INITIALISM_STOPWORDS: &[&str] = &["of", "and", "the", "for", "on", "in", "a", "an", "to", "with", "by"];

/// Lowercases a token and trims surrounding punctuation. Tokens made only
/// of punctuation fold to the empty string and never match.
pub fn fold_token(w: &str) -> String {
    w.trim_matches(|c: char| ".,;:!?()[]{}\"'`".contains(c)).to_lowercase()
}

/// Dictionary key for a surface: tokens folded, then normalized.
pub fn gazetteer_key(surface: &str) -> String {
    let folded: Vec<String> = surface.split_whitespace().map(fold_token).filter(|t| !t.is_empty()).collect();
    normalize_surface(&folded.join(" "))
}

/// First letters of the content words, splitting on hyphens.
pub fn initialism(words: &[&str]) -> String {
    words
        .iter()
        .flat_map(|w| w.split('-'))
        .map(fold_token)
        .filter(|w| !w.is_empty() && !INITIALISM_STOPWORDS.contains(&w.as_str()))
        .filter_map(|w| w.chars().next())
        .collect()
}

/// Finds a parenthesized short form right after `words[..end]`: either
/// `( SHORT )` as three tokens or `(SHORT)` as one.
fn short_form_after(words: &[String], end: usize) -> Option<(String, usize)> {
    match words.get(end..) {
        Some([open, short, close, ..]) if open == "(" && close.starts_with(')') => Some((fold_token(short), 3)),
        Some([tok, ..]) if tok.starts_with('(') && tok.trim_end_matches(['.', ',', ';']).ends_with(')') => {
            Some((fold_token(tok), 1))
        }
        _ => None,
    }
}

pub type TypeCounts = BTreeMap<EntityType, usize>;

/// The dominant type: highest count, ties broken by the fixed type order.
pub fn dominant(counts: &TypeCounts) -> Option<EntityType> {
    counts
        .iter()
        .max_by(|(ta, ca), (tb, cb)| ca.cmp(cb).then(tb.cmp(ta)))
        .map(|(t, _)| *t)
}

/// Which anchors to learn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modality {
    Text,
    Table,
}

/// Dictionary extractor from normalized surfaces to entity types.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gazetteer {
    pub entries: BTreeMap<String, TypeCounts>,
    /// Short form → long form key.
    pub abbrev_links: BTreeMap<String, String>,
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, surface: &str, etype: EntityType) {
        let key = gazetteer_key(surface);
        if !key.is_empty() {
            *self.entries.entry(key).or_default().entry(etype).or_default() += 1;
        }
    }

    pub fn link(&mut self, short: &str, long: &str) {
        let (s, l) = (fold_token(short), gazetteer_key(long));
        if !s.is_empty() && !l.is_empty() && s != l {
            self.abbrev_links.insert(s, l);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn max_words(&self) -> usize {
        self.entries.keys().map(|k| k.split(' ').count()).max().unwrap_or(0)
    }

    /// Type of an exact dictionary key.
    pub fn type_of_key(&self, key: &str) -> Option<EntityType> {
        self.entries.get(key).and_then(dominant)
    }

    /// Type for a whole surface, following abbreviation links.
    pub fn lookup(&self, surface: &str) -> Option<EntityType> {
        let key = gazetteer_key(surface);
        self.type_of_key(&key).or_else(|| {
            self.abbrev_links
                .get(&fold_token(surface))
                .and_then(|long| self.type_of_key(long))
        })
    }

    /// Learns from the gold documents' text or table entities.
    pub fn train(docs: &[AnnotatedDocument], modality: Modality) -> Result<Gazetteer, TextError> {
        let gold: Vec<&AnnotatedDocument> = docs.iter().filter(|d| d.review_state == ReviewState::Gold).collect();
        if gold.is_empty() {
            return Err(TextError::EmptyTrainingSet);
        }
        let mut g = Gazetteer::new();
        for d in gold {
            for e in &d.entities {
                if e.anchor.is_table() != (modality == Modality::Table) {
                    continue;
                }
                g.add(&e.surface, e.etype);
                if let Anchor::Text { s, l, r } = e.anchor {
                    if let Some(sent) = d.doc.sentence(s) {
                        g.harvest_abbrev(sent, l, r, e.etype);
                    }
                }
            }
        }
        Ok(g)
    }

    /// Records `SHORT` → `LONG` when `sent[l..r]` is followed by a
    /// parenthesized initialism of itself, or itself ends in one.
    fn harvest_abbrev(&mut self, sent: &[String], l: usize, r: usize, etype: EntityType) {
        let long: Vec<&str> = sent[l..r].iter().map(String::as_str).collect();
        if let Some((short, _)) = short_form_after(sent, r) {
            if !short.is_empty() && initialism(&long) == short {
                self.link(&short, &long.join(" "));
                return;
            }
        }
        for split in 1..long.len() {
            let tail: Vec<String> = sent[l + split..r].to_vec();
            if let Some((short, n)) = short_form_after(&tail, 0) {
                if n == tail.len() && !short.is_empty() && initialism(&long[..split]) == short {
                    self.link(&short, &long[..split].join(" "));
                    self.add(&long[..split].join(" "), etype);
                    return;
                }
            }
        }
    }

    /// Longest-match, leftmost-first scan of every sentence. Short forms
    /// reached through `abbrev_links`, or defined in the document right
    /// after a matched long form, are extracted with the long form's type.
    pub fn extract(&self, doc: &ParsedDocument) -> Vec<Entity> {
        let sentences = doc.sentences();
        let folded: Vec<Vec<String>> = sentences.iter().map(|s| s.iter().map(|w| fold_token(w)).collect()).collect();
        let max = self.max_words().max(1);

        let mut local: BTreeMap<String, EntityType> = BTreeMap::new();
        for (si, toks) in folded.iter().enumerate() {
            for (l, r, t) in self.scan(toks, max, &BTreeMap::new()) {
                if let Some((short, _)) = short_form_after(sentences[si], r) {
                    let long: Vec<&str> = sentences[si][l..r].iter().map(String::as_str).collect();
                    if !short.is_empty() && initialism(&long) == short && !self.entries.contains_key(&short) {
                        local.entry(short).or_insert(t);
                    }
                }
            }
        }
        for (short, long) in &self.abbrev_links {
            if let Some(t) = self.type_of_key(long) {
                local.entry(short.clone()).or_insert(t);
            }
        }

        let mut out = Vec::new();
        for (si, toks) in folded.iter().enumerate() {
            for (l, r, etype) in self.scan(toks, max, &local) {
                if !etype.is_text_type() {
                    continue;
                }
                let id = EntityId(out.len() as u64);
                let anchor = Anchor::Text { s: si, l, r };
                if let Ok(e) = Entity::new(doc, id, anchor, etype, Provenance::Auto) {
                    out.push(e);
                }
            }
        }
        out
    }

    fn scan(&self, toks: &[String], max: usize, shorts: &BTreeMap<String, EntityType>) -> Vec<(usize, usize, EntityType)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < toks.len() {
            let mut hit = None;
            for n in (1..=max.min(toks.len() - i)).rev() {
                let span = &toks[i..i + n];
                if span.iter().any(String::is_empty) {
                    continue;
                }
                let key = span.join(" ");
                let t = self.type_of_key(&key).or_else(|| if n == 1 { shorts.get(&key).copied() } else { None });
                if let Some(t) = t {
                    hit = Some((i, i + n, t));
                    break;
                }
            }
            match hit {
                Some(h) => {
                    out.push(h);
                    i = h.1;
                }
                None => i += 1,
            }
        }
        out
    }
}

impl super::TextExtractor for Gazetteer {
    fn extract_text(&self, doc: &ParsedDocument) -> Result<Vec<Entity>, ExtractError> {
        Ok(self.extract(doc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latex::{split_words, DomainTag, Section};
    use proptest::prelude::*;

    fn doc(sentences: &[&str]) -> ParsedDocument {
        let mut d = ParsedDocument::new("d", DomainTag::Cs);
        d.sections.push(Section {
            title: String::new(),
            depth: 1,
            paragraphs: vec![sentences.iter().map(|s| split_words(s)).collect()],
        });
        d
    }

    fn spans(es: &[Entity]) -> Vec<(usize, usize, usize, EntityType, String)> {
        es.iter()
            .map(|e| match e.anchor {
                Anchor::Text { s, l, r } => (s, l, r, e.etype, e.surface.clone()),
                _ => unreachable!(),
            })
            .collect()
    }

    /// Brute force: every n-gram is looked up; at each position the longest
    /// hit wins and the scan resumes after it.
    fn oracle(g: &Gazetteer, doc: &ParsedDocument) -> Vec<(usize, usize, usize, EntityType)> {
        let mut out = Vec::new();
        for (si, sent) in doc.sentences().iter().enumerate() {
            let toks: Vec<String> = sent.iter().map(|w| fold_token(w)).collect();
            let mut all = Vec::new();
            for l in 0..toks.len() {
                for r in l + 1..=toks.len() {
                    if toks[l..r].iter().all(|t| !t.is_empty()) {
                        if let Some(t) = g.type_of_key(&toks[l..r].join(" ")) {
                            all.push((l, r, t));
                        }
                    }
                }
            }
            let mut pos = 0;
            loop {
                let best = all
                    .iter()
                    .filter(|(l, _, _)| *l >= pos)
                    .min_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
                match best {
                    Some(&(l, r, t)) => {
                        out.push((si, l, r, t));
                        pos = r;
                    }
                    None => break,
                }
            }
        }
        out
    }

    #[test]
    fn direct_hit() {
        let mut g = Gazetteer::new();
        g.add("BERT", EntityType::Model);
        let es = g.extract(&doc(&["We fine-tune BERT ."]));
        assert_eq!(spans(&es), vec![(0, 2, 3, EntityType::Model, "BERT".into())]);
    }

    #[test]
    fn fixture_matches_oracle() {
        let mut g = Gazetteer::new();
        g.add("image segmentation", EntityType::Task);
        g.add("ResNet", EntityType::Model);
        let d = doc(&[
            "Image segmentation with ResNet and ResNet-50 .",
            "We study semantic image segmentation .",
            "ResNet ResNet improves image segmentation, mostly .",
        ]);
        let got: Vec<_> = spans(&g.extract(&d)).into_iter().map(|(s, l, r, t, _)| (s, l, r, t)).collect();
        assert_eq!(
            got,
            vec![
                (0, 0, 2, EntityType::Task),
                (0, 3, 4, EntityType::Model),
                (1, 3, 5, EntityType::Task),
                (2, 0, 1, EntityType::Model),
                (2, 1, 2, EntityType::Model),
                (2, 3, 5, EntityType::Task),
            ]
        );
        assert_eq!(got, oracle(&g, &d));
    }

    #[test]
    fn abbreviation_in_document() {
        let mut g = Gazetteer::new();
        g.add("coupled multi-layer attention", EntityType::Method);
        let es = g.extract(&doc(&["We propose coupled multi-layer attention ( CMLA ) .", "CMLA works ."]));
        let got: Vec<_> = es.iter().map(|e| e.surface.as_str()).collect();
        assert_eq!(got, vec!["coupled multi-layer attention", "CMLA", "CMLA"]);
        assert!(es.iter().all(|e| e.etype == EntityType::Method));
    }

    #[test]
    fn training_majority_and_abbrev_links() {
        let d = doc(&["BERT BERT BERT BERT and coupled multi-layer attention (CMLA) ."]);
        let mut ad = AnnotatedDocument::new(d.clone(), 1);
        ad.review_state = ReviewState::Gold;
        for (i, (l, t)) in [(0, EntityType::Model), (1, EntityType::Model), (2, EntityType::Model), (3, EntityType::Method)].into_iter().enumerate() {
            ad.entities.push(Entity::new(&d, EntityId(i as u64), Anchor::Text { s: 0, l, r: l + 1 }, t, Provenance::Reviewed).unwrap());
        }
        ad.entities.push(Entity::new(&d, EntityId(9), Anchor::Text { s: 0, l: 5, r: 8 }, EntityType::Method, Provenance::Reviewed).unwrap());
        let g = Gazetteer::train(&[ad.clone()], Modality::Text).unwrap();
        assert_eq!(g.type_of_key("bert"), Some(EntityType::Model));
        assert_eq!(g.abbrev_links.get("cmla").map(String::as_str), Some("coupled multi-layer attention"));
        assert_eq!(g.lookup("CMLA"), Some(EntityType::Method));

        ad.review_state = ReviewState::InReview;
        assert_eq!(Gazetteer::train(&[ad], Modality::Text), Err(TextError::EmptyTrainingSet));
    }

    #[test]
    fn ties_use_fixed_order() {
        let mut g = Gazetteer::new();
        g.add("x", EntityType::Method);
        g.add("x", EntityType::Task);
        assert_eq!(g.lookup("x"), Some(EntityType::Task));
    }

    #[test]
    fn initialisms() {
        assert_eq!(initialism(&["coupled", "multi-layer", "attention"]), "cmla");
        assert_eq!(initialism(&["Conditional", "Random", "Fields"]), "crf");
        assert_eq!(initialism(&["bag", "of", "words"]), "bw");
    }

    proptest! {
        #[test]
        fn extraction_equals_oracle(
            words in proptest::collection::vec(proptest::sample::select(vec!["a", "b", "c", "d", "x", "(", "B."]), 0..25),
            dict in proptest::collection::vec(proptest::collection::vec(proptest::sample::select(vec!["a", "b", "c", "d"]), 1..4), 0..6),
        ) {
            let mut g = Gazetteer::new();
            for (i, e) in dict.iter().enumerate() {
                g.add(&e.join(" "), EntityType::TEXT[i % 5]);
            }
            let d = doc(&[&words.join(" ")]);
            let got: Vec<_> = spans(&g.extract(&d)).into_iter().map(|(s, l, r, t, _)| (s, l, r, t)).collect();
            prop_assert_eq!(got, oracle(&g, &d));
        }
    }
}
