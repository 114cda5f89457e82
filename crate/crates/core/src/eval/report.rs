use super::{categorize_errors, entity_distribution, ner_keys, re_keys, score_ner, score_re, ErrorCounts, ErrorItem, Prf, SpeedReport};
use crate::docmodel::{AnnotatedDocument, EntityType};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    TextNer,
    TableNer,
    TableRe,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::TextNer, Task::TableNer, Task::TableRe];

    pub fn title(self) -> &'static str {
        match self {
            Task::TextNer => "Text NER",
            Task::TableNer => "Table NER",
            Task::TableRe => "Table RE",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub per_domain: bool,
    pub errors: bool,
    /// Also require endpoint types to match for relations.
    pub strict_re_types: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_task: BTreeMap<Task, Prf>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_domain: BTreeMap<String, BTreeMap<Task, Prf>>,
    /// Unweighted mean over domains of the per-domain F1.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub macro_f1_over_domains: BTreeMap<Task, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<SpeedReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors: Option<ErrorCounts>,
    /// Type shares among gold table entities.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub entity_distribution: BTreeMap<EntityType, f64>,
}

fn score_pair(gold: &AnnotatedDocument, pred: Option<&AnnotatedDocument>, strict: bool) -> BTreeMap<Task, Prf> {
    let mut out = BTreeMap::new();
    for (task, table) in [(Task::TextNer, false), (Task::TableNer, true)] {
        let p = pred.map(|p| ner_keys(p, table)).unwrap_or_default();
        out.insert(task, score_ner(&ner_keys(gold, table), &p));
    }
    let p = pred.map(|p| re_keys(p, strict)).unwrap_or_default();
    out.insert(Task::TableRe, score_re(&re_keys(gold, strict), &p));
    out
}

fn pool(into: &mut BTreeMap<Task, Prf>, add: &BTreeMap<Task, Prf>) {
    for (t, prf) in add {
        let cur = into.entry(*t).or_default();
        *cur = cur.merge(prf);
    }
}

/// Scores `pred` against `gold`, pairing documents by id. Counts are
/// pooled over documents, so the overall row equals the pooled domain
/// rows. Predicted documents without a gold counterpart are ignored.
pub fn evaluate(gold: &[AnnotatedDocument], pred: &[AnnotatedDocument], opts: &EvalOptions) -> EvalReport {
    let by_id: BTreeMap<&str, &AnnotatedDocument> = pred.iter().map(|d| (d.doc_id(), d)).collect();
    for p in pred {
        if !gold.iter().any(|g| g.doc_id() == p.doc_id()) {
            log::warn!("prediction for `{}` has no gold document", p.doc_id());
        }
    }
    let mut report = EvalReport::default();
    let mut domains: BTreeMap<String, BTreeMap<Task, Prf>> = BTreeMap::new();
    let mut errors = ErrorCounts::default();
    for g in gold {
        let p = by_id.get(g.doc_id()).copied();
        let scores = score_pair(g, p, opts.strict_re_types);
        pool(&mut report.per_task, &scores);
        pool(domains.entry(g.doc.domain_tag.to_string()).or_default(), &scores);
        if opts.errors {
            for (table, types) in [(false, &EntityType::TEXT[..]), (true, &EntityType::ALL[..])] {
                let preds: Vec<ErrorItem> = p.map(|p| ner_keys(p, table)).unwrap_or_default().iter().map(ErrorItem::from).collect();
                let c = categorize_errors(&ner_keys(g, table), &preds, types, 0);
                errors.missing += c.missing;
                errors.unannotated += c.unannotated;
                errors.incorrect_type += c.incorrect_type;
                errors.undefined_type += c.undefined_type;
            }
        }
    }
    for t in Task::ALL {
        report.per_task.entry(t).or_default();
    }
    if opts.per_domain {
        for t in Task::ALL {
            if !domains.is_empty() {
                let sum: f64 = domains.values().map(|m| m.get(&t).map_or(0.0, |p| p.f1)).sum();
                report.macro_f1_over_domains.insert(t, sum / domains.len() as f64);
            }
        }
        report.per_domain = domains;
    }
    if opts.errors {
        report.errors = Some(errors);
    }
    report.entity_distribution = entity_distribution(gold).unwrap_or_default();
    report
}

impl EvalReport {
    /// Plain-text table: one row per aggregate, P/R/F1 in percent for
    /// each task.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:<10}", "");
        for t in Task::ALL {
            let _ = write!(s, " | {:^20}", t.title());
        }
        s.push('\n');
        let _ = write!(s, "{:<10}", "");
        for _ in Task::ALL {
            let _ = write!(s, " | {:>6} {:>6} {:>6}", "P", "R", "F1");
        }
        s.push('\n');
        let mut row = |name: &str, m: &BTreeMap<Task, Prf>| {
            let _ = write!(s, "{name:<10}");
            for t in Task::ALL {
                let p = m.get(&t).copied().unwrap_or_default();
                let _ = write!(s, " | {:>6.1} {:>6.1} {:>6.1}", 100.0 * p.precision, 100.0 * p.recall, 100.0 * p.f1);
            }
            s.push('\n');
        };
        row("Overall", &self.per_task);
        for (d, m) in &self.per_domain {
            row(d, m);
        }
        if let Some(sp) = &self.speed {
            let rate = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.1}"));
            let _ = writeln!(
                s,
                "\nSpeed (batch {}): text {} sent/s, table NER {} table/s, table RE {} table/s\nHardware: {}",
                sp.batch,
                rate(sp.text.per_second),
                rate(sp.table_ner.per_second),
                rate(sp.table_re.per_second),
                sp.hardware
            );
        }
        if let Some(e) = &self.errors {
            let _ = writeln!(
                s,
                "\nErrors: missing {}, unannotated {}, incorrect type {}, undefined type {}, others {}",
                e.missing, e.unannotated, e.incorrect_type, e.undefined_type, e.others
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::{Anchor, Entity, EntityId, Provenance, TableRelation};
    use crate::latex::{split_words, DomainTag, ParsedDocument, Section, TableGrid};

    fn doc(id: &str, domain: DomainTag) -> AnnotatedDocument {
        let mut d = ParsedDocument::new(id, domain);
        d.sections.push(Section { title: String::new(), depth: 1, paragraphs: vec![vec![split_words("We use BERT on GLUE .")]] });
        d.tables.push(TableGrid::from_strings("", &[vec!["System", "F1"], vec!["BERT", "92.2"]]));
        AnnotatedDocument::new(d, 1)
    }

    fn add(d: &mut AnnotatedDocument, anchor: Anchor, t: EntityType) -> EntityId {
        let id = d.next_entity_id();
        let e = Entity::new(&d.doc, id, anchor, t, Provenance::Auto).unwrap();
        d.entities.push(e);
        id
    }

    #[test]
    fn overall_is_pooled_domains() {
        let mut g1 = doc("a", DomainTag::Cs);
        add(&mut g1, Anchor::Text { s: 0, l: 2, r: 3 }, EntityType::Model);
        let m = add(&mut g1, Anchor::whole_cell(0, 0, 1, 1), EntityType::Metric);
        let sc = add(&mut g1, Anchor::whole_cell(0, 1, 1, 1), EntityType::Score);
        g1.relations.push(TableRelation::new(m, sc, 0, Provenance::Reviewed));
        let mut g2 = doc("b", DomainTag::Stat);
        add(&mut g2, Anchor::Text { s: 0, l: 4, r: 5 }, EntityType::Dataset);

        let mut p1 = doc("a", DomainTag::Cs);
        add(&mut p1, Anchor::Text { s: 0, l: 2, r: 3 }, EntityType::Model);
        let sc = add(&mut p1, Anchor::whole_cell(0, 1, 1, 1), EntityType::Score);
        let m = add(&mut p1, Anchor::whole_cell(0, 0, 1, 1), EntityType::Model);
        p1.relations.push(TableRelation::new(sc, m, 0, Provenance::Auto));
        let mut p2 = doc("b", DomainTag::Stat);
        add(&mut p2, Anchor::Text { s: 0, l: 2, r: 3 }, EntityType::Model);

        let r = evaluate(&[g1, g2], &[p1, p2], &EvalOptions { per_domain: true, errors: true, strict_re_types: false });
        let text = r.per_task[&Task::TextNer];
        assert_eq!((text.tp, text.fp, text.fn_), (1, 1, 1));
        assert_eq!(r.per_task[&Task::TableRe].f1, 1.0);
        let table = r.per_task[&Task::TableNer];
        assert_eq!((table.tp, table.fp, table.fn_), (1, 1, 1));
        let mut pooled = BTreeMap::new();
        for m in r.per_domain.values() {
            pool(&mut pooled, m);
        }
        assert_eq!(pooled, r.per_task);
        let e = r.errors.unwrap();
        assert_eq!((e.missing, e.unannotated, e.incorrect_type), (2, 1, 1));
        assert_eq!(r.entity_distribution[&EntityType::Score], 0.5);
        assert!(r.render().contains("Overall"));
    }

    #[test]
    fn missing_prediction_is_all_fn() {
        let mut g = doc("a", DomainTag::Cs);
        add(&mut g, Anchor::Text { s: 0, l: 2, r: 3 }, EntityType::Model);
        let r = evaluate(&[g], &[], &EvalOptions::default());
        assert_eq!(r.per_task[&Task::TextNer].fn_, 1);
    }
}
