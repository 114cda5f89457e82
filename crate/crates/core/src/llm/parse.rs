//! Tolerant readers for model answers. The answer formats are Python-ish
//! literals written by a language model, so quotes may be `'`, `"`, `` ` ``
//! or typographic, strings may hold apostrophes, prose may surround the
//! literal and the text may stop mid-way. Every reader is total.

use crate::docmodel::{Anchor, Entity, EntityId, EntityType, Provenance};
use crate::latex::{ParsedDocument, TableGrid};
use crate::table::canonical_pair;
use crate::text::fold_token;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    /// Output that could not be read or mapped onto the input.
    Malformed,
    /// A type outside the task's type set.
    UndefinedType,
    /// The answer stops inside a literal.
    Truncated,
    /// A surface matching several table cells; all of them were used.
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseIssue {
    pub kind: IssueKind,
    pub fragment: String,
}

/// An item whose type is not in the type set, located when possible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawItem {
    pub surface: String,
    pub label: String,
    pub anchor: Option<Anchor>,
}

pub type CellPairCoords = ((usize, usize), (usize, usize));

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedResponse {
    pub entities: Vec<Entity>,
    pub relations: Vec<CellPairCoords>,
    pub undefined: Vec<RawItem>,
    pub issues: Vec<ParseIssue>,
}

impl ParsedResponse {
    fn issue(&mut self, kind: IssueKind, fragment: impl Into<String>) {
        let mut fragment: String = fragment.into();
        if fragment.chars().count() > 120 {
            fragment = fragment.chars().take(120).collect();
        }
        self.issues.push(ParseIssue { kind, fragment });
    }

    pub fn count(&self, kind: IssueKind) -> usize {
        self.issues.iter().filter(|i| i.kind == kind).count()
    }
}

// Literal reader.

#[derive(Debug, Clone, PartialEq)]
enum Value {
    /// Text and whether its closing quote was seen.
    Str(String, bool),
    Bare(String),
    /// Elements and whether the closing bracket was seen.
    List(Vec<Elem>, bool),
}

#[derive(Debug, Clone, PartialEq)]
enum Elem {
    Single(Value),
    Pair(Value, Value),
}

impl Value {
    fn complete(&self) -> bool {
        match self {
            Value::Str(_, closed) => *closed,
            Value::Bare(_) => true,
            Value::List(items, closed) => *closed && items.iter().all(Elem::complete),
        }
    }

    fn text(&self) -> Option<&str> {
        match self {
            Value::Str(s, _) | Value::Bare(s) => Some(s.as_str()),
            Value::List(..) => None,
        }
    }

    fn is_none_word(&self) -> bool {
        matches!(self, Value::Bare(s) if is_none_word(s))
    }
}

impl Elem {
    fn complete(&self) -> bool {
        match self {
            Elem::Single(v) => v.complete(),
            Elem::Pair(a, b) => a.complete() && b.complete(),
        }
    }
}

fn is_none_word(s: &str) -> bool {
    matches!(s.trim().to_ascii_lowercase().as_str(), "" | "none" | "null" | "n/a")
}

const OPEN_QUOTES: &[char] = &['\'', '"', '`', '\u{2018}', '\u{201c}'];
const CLOSE_QUOTES: &[char] = &['\'', '"', '`', '\u{2019}', '\u{201d}'];

struct Reader {
    chars: Vec<char>,
    pos: usize,
    truncated: bool,
    stray: Vec<char>,
}

impl Reader {
    fn new(s: &str) -> Self {
        Reader {
            chars: s.chars().collect(),
            pos: 0,
            truncated: false,
            stray: Vec::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn value(&mut self) -> Value {
        self.skip_ws();
        match self.peek() {
            Some('[') => self.list(']'),
            Some('{') => self.list('}'),
            Some(c) if OPEN_QUOTES.contains(&c) => self.string(),
            None => {
                self.truncated = true;
                Value::Str(String::new(), false)
            }
            Some(_) => self.bare(),
        }
    }

    fn list(&mut self, close: char) -> Value {
        self.pos += 1;
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => {
                    self.truncated = true;
                    return Value::List(items, false);
                }
                Some(c) if c == close => {
                    self.pos += 1;
                    return Value::List(items, true);
                }
                Some(',') => self.pos += 1,
                Some(c @ (']' | '}' | ':')) => {
                    // Mismatched bracket or dangling colon.
                    self.stray.push(c);
                    self.pos += 1;
                }
                Some(_) => {
                    let start = self.pos;
                    let v = self.value();
                    self.skip_ws();
                    if self.peek() == Some(':') {
                        self.pos += 1;
                        let w = self.value();
                        items.push(Elem::Pair(v, w));
                    } else {
                        items.push(Elem::Single(v));
                    }
                    if self.pos == start {
                        self.pos += 1;
                    }
                }
            }
        }
    }

    /// A quoted string. A closing quote only counts when the next
    /// non-blank character ends the item (`,` `]` `}` `:`) or the input
    /// ends, so apostrophes inside names survive.
    fn string(&mut self) -> Value {
        self.pos += 1;
        let start = self.pos;
        let mut i = start;
        while i < self.chars.len() {
            if CLOSE_QUOTES.contains(&self.chars[i]) {
                let mut k = i + 1;
                while k < self.chars.len() && self.chars[k].is_whitespace() {
                    k += 1;
                }
                if k == self.chars.len() || matches!(self.chars[k], ',' | ']' | '}' | ':') {
                    let s: String = self.chars[start..i].iter().collect();
                    self.pos = i + 1;
                    return Value::Str(s, true);
                }
            }
            i += 1;
        }
        self.truncated = true;
        self.pos = self.chars.len();
        Value::Str(self.chars[start..].iter().collect(), false)
    }

    fn bare(&mut self) -> Value {
        let start = self.pos;
        while self.peek().is_some_and(|c| !matches!(c, ',' | ']' | '}' | ':' | '[' | '{')) {
            self.pos += 1;
        }
        Value::Bare(self.chars[start..self.pos].iter().collect::<String>().trim().to_string())
    }
}

/// Reads the first bracketed literal in `response`. `None` means the
/// answer holds no literal at all.
fn read_literal(response: &str, out: &mut ParsedResponse) -> Option<Value> {
    let Some(start) = response.find(['[', '{']) else {
        if !is_none_word(response.trim().trim_end_matches('.')) {
            out.issue(IssueKind::Malformed, response.trim());
        }
        return None;
    };
    let mut r = Reader::new(&response[start..]);
    let v = r.value();
    if r.truncated {
        let tail: String = response.chars().rev().take(40).collect::<Vec<_>>().into_iter().rev().collect();
        out.issue(IssueKind::Truncated, tail);
    }
    for c in r.stray {
        out.issue(IssueKind::Malformed, c.to_string());
    }
    Some(v)
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Str(s, _) | Value::Bare(s) => s.clone(),
        Value::List(items, _) => {
            let parts: Vec<String> = items
                .iter()
                .map(|e| match e {
                    Elem::Single(v) => render_value(v),
                    Elem::Pair(a, b) => format!("{}: {}", render_value(a), render_value(b)),
                })
                .collect();
            format!("[{}]", parts.join(", "))
        }
    }
}

/// `(surface, label)` items of a text NER answer, accepting `[[name,
/// type], ...]`, `[name: type, ...]` and `{type: [names]}`.
fn name_type_items(v: Value, out: &mut ParsedResponse) -> Vec<(String, String)> {
    let mut items = Vec::new();
    let Value::List(elems, _) = v else {
        if !v.is_none_word() {
            out.issue(IssueKind::Malformed, render_value(&v));
        }
        return items;
    };
    for e in elems {
        if !e.complete() {
            continue;
        }
        match e {
            Elem::Single(Value::List(inner, _)) => {
                let texts: Vec<&str> = inner
                    .iter()
                    .filter_map(|x| match x {
                        Elem::Single(v) => v.text(),
                        Elem::Pair(..) => None,
                    })
                    .collect();
                if texts.len() == 2 && inner.len() == 2 {
                    items.push((texts[0].to_string(), texts[1].to_string()));
                } else if !inner.is_empty() {
                    out.issue(IssueKind::Malformed, render_value(&Value::List(inner, true)));
                }
            }
            Elem::Pair(k, Value::List(names, _)) if k.text().is_some() => {
                let label = k.text().unwrap_or_default().to_string();
                for n in names {
                    match n {
                        Elem::Single(v) if v.text().is_some() => items.push((v.text().unwrap_or_default().to_string(), label.clone())),
                        other => out.issue(IssueKind::Malformed, render_value(&Value::List(vec![other], true))),
                    }
                }
            }
            Elem::Pair(a, b) if a.text().is_some() && b.text().is_some() => {
                if !b.is_none_word() {
                    items.push((a.text().unwrap_or_default().to_string(), b.text().unwrap_or_default().to_string()));
                }
            }
            Elem::Single(v) if v.is_none_word() => {}
            other => out.issue(IssueKind::Malformed, render_value(&Value::List(vec![other], true))),
        }
    }
    items
}

// Text NER.

fn words_of(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

/// Word occurrences of `surface` in the sentences, exact first, then on
/// folded tokens.
fn occurrences(doc: &ParsedDocument, sentences: &Range<usize>, surface: &str) -> Vec<Anchor> {
    let target = words_of(surface);
    if target.is_empty() {
        return Vec::new();
    }
    let folded: Vec<String> = target.iter().map(|w| fold_token(w)).collect();
    let all = doc.sentences();
    for exact in [true, false] {
        let mut hits = Vec::new();
        for s in sentences.clone() {
            let Some(sent) = all.get(s) else { break };
            if sent.len() < target.len() {
                continue;
            }
            for l in 0..=sent.len() - target.len() {
                let window = &sent[l..l + target.len()];
                let ok = if exact {
                    window.iter().zip(&target).all(|(a, b)| a == b)
                } else {
                    window.iter().zip(&folded).all(|(a, b)| !b.is_empty() && fold_token(a) == *b)
                };
                if ok {
                    hits.push(Anchor::Text { s, l, r: l + target.len() });
                }
            }
        }
        if !hits.is_empty() {
            return hits;
        }
    }
    Vec::new()
}

/// Reads a `[[Entity Name, Entity Type]]` answer for the sentences
/// `sentences` of `doc`. Each surface is anchored at its leftmost
/// occurrence not already taken by an earlier item; repeated items with
/// no free occurrence are dropped.
pub fn parse_text_ner(response: &str, doc: &ParsedDocument, sentences: Range<usize>) -> ParsedResponse {
    let mut out = ParsedResponse::default();
    let Some(v) = read_literal(response, &mut out) else { return out };
    let mut taken: BTreeSet<Anchor> = BTreeSet::new();
    for (surface, label) in name_type_items(v, &mut out) {
        let etype = EntityType::parse_loose(&label).filter(|t| t.is_text_type());
        let hits = occurrences(doc, &sentences, &surface);
        let free = hits.iter().find(|a| !taken.contains(a)).copied();
        let Some(etype) = etype else {
            out.issue(IssueKind::UndefinedType, format!("{surface}: {label}"));
            if let Some(a) = free {
                taken.insert(a);
            }
            out.undefined.push(RawItem { surface, label, anchor: free });
            continue;
        };
        match free {
            Some(anchor) => {
                taken.insert(anchor);
                if let Ok(e) = Entity::new(doc, EntityId(out.entities.len() as u64), anchor, etype, Provenance::Llm) {
                    out.entities.push(e);
                }
            }
            None if hits.is_empty() => out.issue(IssueKind::Malformed, format!("`{surface}` not found in the sentences")),
            None => {}
        }
    }
    out
}

// Table NER and RE.

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn strip_ws(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase()
}

/// Cells whose text equals `surface`: exactly, then ignoring case and
/// whitespace runs, then ignoring whitespace entirely.
pub fn matching_cells(grid: &TableGrid, surface: &str) -> Vec<(usize, usize)> {
    let texts: Vec<((usize, usize), String)> = grid.coords().map(|c| (c, grid.cell_text(c.0, c.1))).collect();
    let target = surface.trim();
    if target.is_empty() {
        return Vec::new();
    }
    let tests: [&dyn Fn(&str) -> bool; 3] = [
        &|t: &str| t == target,
        &|t: &str| squash(t) == squash(target),
        &|t: &str| strip_ws(t) == strip_ws(target),
    ];
    for test in tests {
        let hits: Vec<(usize, usize)> = texts.iter().filter(|(_, t)| !t.is_empty() && test(t)).map(|(c, _)| *c).collect();
        if !hits.is_empty() {
            return hits;
        }
    }
    Vec::new()
}

/// Reads a `{'Type': [cells], ...}` answer over `grid`. Surfaces map to
/// whole cells; a surface matching several cells yields all of them and an
/// `ambiguous` issue.
pub fn parse_table_ner(response: &str, grid: &TableGrid, table_idx: usize, include_score: bool) -> ParsedResponse {
    let mut out = ParsedResponse::default();
    let Some(v) = read_literal(response, &mut out) else { return out };
    let mut seen = BTreeSet::new();
    for (surface, label) in name_type_items(v, &mut out) {
        let etype = EntityType::parse_loose(&label).filter(|t| include_score || *t != EntityType::Score);
        let cells = matching_cells(grid, &surface);
        let Some(etype) = etype else {
            out.issue(IssueKind::UndefinedType, format!("{surface}: {label}"));
            let anchor = cells.first().map(|&(i, j)| cell_anchor(grid, table_idx, i, j));
            out.undefined.push(RawItem { surface, label, anchor });
            continue;
        };
        if cells.is_empty() {
            out.issue(IssueKind::Malformed, format!("`{surface}` matches no cell"));
            continue;
        }
        if cells.len() > 1 {
            out.issue(IssueKind::Ambiguous, format!("`{surface}` matches {} cells", cells.len()));
        }
        for (i, j) in cells {
            if seen.insert((i, j, etype)) {
                out.entities.push(Entity {
                    id: EntityId(out.entities.len() as u64),
                    anchor: cell_anchor(grid, table_idx, i, j),
                    etype,
                    surface: grid.cell_text(i, j),
                    provenance: Provenance::Llm,
                });
            }
        }
    }
    out
}

fn cell_anchor(grid: &TableGrid, t: usize, i: usize, j: usize) -> Anchor {
    Anchor::whole_cell(t, i, j, grid.cell(i, j).map_or(0, Vec::len))
}

fn collect_pairs(v: &Value, acc: &mut Vec<(String, String)>) {
    let Value::List(items, _) = v else { return };
    for e in items {
        if !e.complete() {
            continue;
        }
        match e {
            Elem::Pair(a, b) => match (a.text(), b) {
                (Some(x), Value::List(inner, _)) => {
                    for i in inner {
                        if let Elem::Single(w) = i {
                            if let Some(y) = w.text() {
                                acc.push((x.to_string(), y.to_string()));
                            }
                        }
                    }
                }
                (Some(x), w) => {
                    if let Some(y) = w.text() {
                        acc.push((x.to_string(), y.to_string()));
                    }
                }
                _ => {}
            },
            Elem::Single(inner) => collect_pairs(inner, acc),
        }
    }
}

/// Reads a `{[cell: cell, ...]}` answer over `grid` into canonical
/// coordinate pairs.
pub fn parse_table_re(response: &str, grid: &TableGrid) -> ParsedResponse {
    let mut out = ParsedResponse::default();
    let Some(v) = read_literal(response, &mut out) else { return out };
    let mut pairs = Vec::new();
    collect_pairs(&v, &mut pairs);
    let mut seen = BTreeSet::new();
    for (a, b) in pairs {
        if is_none_word(&a) && is_none_word(&b) {
            continue;
        }
        let (ca, cb) = (matching_cells(grid, &a), matching_cells(grid, &b));
        if ca.is_empty() || cb.is_empty() {
            let missing = if ca.is_empty() { &a } else { &b };
            out.issue(IssueKind::Malformed, format!("`{missing}` matches no cell"));
            continue;
        }
        if ca.len() * cb.len() > 1 {
            out.issue(IssueKind::Ambiguous, format!("`{a}: {b}` matches {} cell pairs", ca.len() * cb.len()));
        }
        for &x in &ca {
            for &y in &cb {
                if x != y && seen.insert(canonical_pair(x, y)) {
                    out.relations.push(canonical_pair(x, y));
                }
            }
        }
    }
    out
}

// Rendering in the answer formats, used for demonstrations and tests.

pub fn quote(s: &str) -> String {
    if s.contains('\'') {
        format!("\"{s}\"")
    } else {
        format!("'{s}'")
    }
}

pub fn render_text_ner(items: &[(String, EntityType)]) -> String {
    let parts: Vec<String> = items.iter().map(|(s, t)| format!("[{}, {}]", quote(s), quote(t.as_str()))).collect();
    format!("[{}]", parts.join(", "))
}

/// Answer keys in the order the table NER question lists them.
pub fn table_ner_keys(include_score: bool) -> Vec<EntityType> {
    use EntityType::*;
    let mut keys = vec![Task, Dataset, Model, Method, Metric, Setting];
    if include_score {
        keys.push(Score);
    }
    keys
}

pub fn render_table_ner(items: &[(String, EntityType)], include_score: bool) -> String {
    let parts: Vec<String> = table_ner_keys(include_score)
        .into_iter()
        .map(|t| {
            let names: Vec<String> = items.iter().filter(|(_, et)| *et == t).map(|(s, _)| quote(s)).collect();
            format!("{}: [{}]", quote(t.as_str()), names.join(", "))
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn render_table_re(pairs: &[(String, String)]) -> String {
    let parts: Vec<String> = pairs.iter().map(|(a, b)| format!("{}:{}", quote(a), quote(b))).collect();
    format!("{{[{}]}}", parts.join(", "))
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

    #[test]
    fn two_entities() {
        let d = doc(&["We fine-tune BERT on GLUE ."]);
        let r = parse_text_ner("[['BERT','Model'],['GLUE','Dataset']]", &d, 0..1);
        let got: Vec<_> = r.entities.iter().map(|e| (e.surface.as_str(), e.etype, e.anchor)).collect();
        assert_eq!(
            got,
            vec![
                ("BERT", EntityType::Model, Anchor::Text { s: 0, l: 2, r: 3 }),
                ("GLUE", EntityType::Dataset, Anchor::Text { s: 0, l: 4, r: 5 }),
            ]
        );
        assert!(r.issues.is_empty());
    }

    #[test]
    fn empty_list_and_person() {
        let d = doc(&["Danqi Chen wrote it ."]);
        let r = parse_text_ner("[]", &d, 0..1);
        assert!(r.entities.is_empty() && r.issues.is_empty());
        let r = parse_text_ner("[['Danqi Chen','Person']]", &d, 0..1);
        assert!(r.entities.is_empty());
        assert_eq!(r.issues.len(), 1);
        assert_eq!(r.issues[0].kind, IssueKind::UndefinedType);
        assert_eq!(r.undefined[0].anchor, Some(Anchor::Text { s: 0, l: 0, r: 2 }));
    }

    #[test]
    fn tolerant_quotes_and_prose() {
        let d = doc(&["We use BERT and BERT ; Dijkstra's algorithm too ."]);
        let r = parse_text_ner(
            "Sure! Entities: [[\u{2018}BERT\u{2019}, \"Model\"], [`BERT', 'Model'], ['Dijkstra's algorithm', 'Method']] hope this helps",
            &d,
            0..1,
        );
        let spans: Vec<_> = r.entities.iter().map(|e| e.anchor).collect();
        assert_eq!(
            spans,
            vec![Anchor::Text { s: 0, l: 2, r: 3 }, Anchor::Text { s: 0, l: 4, r: 5 }, Anchor::Text { s: 0, l: 6, r: 8 }]
        );
        assert!(r.issues.is_empty(), "{:?}", r.issues);
    }

    #[test]
    fn truncated_and_missing() {
        let d = doc(&["We use BERT ."]);
        let r = parse_text_ner("[['BERT', 'Model'], ['ELMo', 'Mod", &d, 0..1);
        assert_eq!(r.entities.len(), 1);
        assert_eq!(r.count(IssueKind::Truncated), 1);
        let r = parse_text_ner("[['ELMo', 'Model']]", &d, 0..1);
        assert_eq!(r.count(IssueKind::Malformed), 1);
        let r = parse_text_ner("I cannot help with that.", &d, 0..1);
        assert_eq!(r.count(IssueKind::Malformed), 1);
    }

    fn excerpt() -> TableGrid {
        TableGrid::from_strings("", &[vec!["System", "F1"], vec!["bertbase", "84.6/83.4"]])
    }

    #[test]
    fn table_ner_example() {
        let r = parse_table_ner(
            r#"{"Task": [], "Dataset": [], "Model": ["bertbase"], "Method": [], "Metric": ["F1"], "Setting": []}"#,
            &excerpt(),
            0,
            false,
        );
        let got: Vec<_> = r.entities.iter().map(|e| (e.anchor.cell().unwrap(), e.etype)).collect();
        assert_eq!(got, vec![((1, 0), EntityType::Model), ((0, 1), EntityType::Metric)]);
        assert!(r.issues.is_empty());
        assert!(parse_table_ner("None", &excerpt(), 0, false).entities.is_empty());
        assert!(parse_table_ner("None", &excerpt(), 0, false).issues.is_empty());
        let r = parse_table_ner("{'Score': ['84.6/83.4']}", &excerpt(), 0, false);
        assert_eq!(r.count(IssueKind::UndefinedType), 1);
    }

    #[test]
    fn table_ner_ambiguous() {
        let g = TableGrid::from_strings("", &[vec!["System", "EM", "F1", "EM"]]);
        let r = parse_table_ner("{'Metric': ['EM', 'F1']}", &g, 0, true);
        assert_eq!(r.entities.len(), 3);
        assert_eq!(r.count(IssueKind::Ambiguous), 1);
    }

    #[test]
    fn table_re_example() {
        let g = TableGrid::from_strings(
            "",
            &[vec!["System", "Dev", "Dev", "Test", "Test"], vec!["#1 Ensemble - nlnet", "-", "-", "86.0", "91.7"]],
        );
        let r = parse_table_re("{['#1 Ensemble - nlnet':'91.7']}", &g);
        assert_eq!(r.relations, vec![((1, 0), (1, 4))]);
        assert!(r.issues.is_empty());
        assert!(parse_table_re("None", &g).relations.is_empty());
        let r = parse_table_re("{['#1 Ensemble - nlnet':'Dev', 'x': 'Test']}", &g);
        assert_eq!(r.relations.len(), 2);
        assert_eq!(r.count(IssueKind::Ambiguous), 1);
        assert_eq!(r.count(IssueKind::Malformed), 1);
    }

    #[test]
    fn whitespace_insensitive_cell_match() {
        let g = TableGrid::from_strings("", &[vec!["#1 Ensemble - nlnet"]]);
        assert_eq!(matching_cells(&g, "#1 Ensemble-nlnet"), vec![(0, 0)]);
    }

    proptest! {
        #[test]
        fn total_on_arbitrary_input(s in "\\PC{0,200}") {
            let d = doc(&["a b c"]);
            let g = excerpt();
            let _ = parse_text_ner(&s, &d, 0..5);
            let _ = parse_table_ner(&s, &g, 0, true);
            let _ = parse_table_re(&s, &g);
        }

        #[test]
        fn total_on_bracket_soup(s in "[\\[\\]{}:,'\"` aBN]{0,80}") {
            let d = doc(&["a B"]);
            let _ = parse_text_ner(&s, &d, 0..1);
            let _ = parse_table_ner(&s, &excerpt(), 0, true);
            let _ = parse_table_re(&s, &excerpt());
        }

        #[test]
        fn text_roundtrip(picks in proptest::collection::btree_set(0usize..6, 0..6), types in proptest::collection::vec(0usize..5, 6)) {
            let words = ["BERT", "GLUE", "SQuAD", "ResNet", "accuracy", "Adam"];
            let d = doc(&["BERT GLUE SQuAD ResNet accuracy Adam"]);
            let items: Vec<(String, EntityType)> = picks.iter().map(|&k| (words[k].to_string(), EntityType::TEXT[types[k]])).collect();
            let r = parse_text_ner(&render_text_ner(&items), &d, 0..1);
            let back: Vec<(String, EntityType)> = r.entities.iter().map(|e| (e.surface.clone(), e.etype)).collect();
            prop_assert_eq!(back, items);
            prop_assert!(r.issues.is_empty());
        }

        #[test]
        fn table_roundtrip(assign in proptest::collection::vec(proptest::option::of(0usize..7), 6)) {
            let cells = ["System", "F1", "EM", "BERT", "92.2", "GPT"];
            let g = TableGrid::from_strings("", &[cells[..3].to_vec(), cells[3..].to_vec()]);
            let items: Vec<(String, EntityType)> = assign.iter().enumerate()
                .filter_map(|(k, t)| t.map(|t| (cells[k].to_string(), EntityType::ALL[t]))).collect();
            let r = parse_table_ner(&render_table_ner(&items, true), &g, 0, true);
            let mut back: Vec<(String, EntityType)> = r.entities.iter().map(|e| (e.surface.clone(), e.etype)).collect();
            let mut want = items.clone();
            back.sort();
            want.sort();
            prop_assert_eq!(back, want);

            let pairs: Vec<(String, String)> = items.windows(2).map(|w| (w[0].0.clone(), w[1].0.clone())).collect();
            let r = parse_table_re(&render_table_re(&pairs), &g);
            prop_assert_eq!(r.relations.len(), pairs.len());
        }
    }
}
