//! Seeded synthetic corpora with known gold annotations, plus a simulated
//! reviewer. Used to exercise the round loop and the evaluation harness
//! without real papers.

use crate::docmodel::{
    Anchor, AnnotatedDocument, CorpusPartition, Entity, EntityId, EntityType, PartitionManifest, PartitionName, Provenance,
    ReviewState, TableRelation,
};
use crate::eval::{evaluate, EvalOptions, EvalReport};
use crate::llm::CellPairCoords;
use crate::latex::{DomainTag, ParsedDocument, Section, TableGrid};
use crate::pipeline::{
    advance_round, annotate_document, apply_corrections, load_gazetteers, review, run_stage1, Correction, PipelineError, Stage1Options,
    Workspace,
};
use crate::table::{HeuristicTableBackend, TableConfig};
use crate::text::gazetteer_key;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub vocab_size: usize,
    pub seeds: usize,
    pub added: usize,
    pub test: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { seed: 7, vocab_size: 200, seeds: 10, added: 30, test: 10 }
    }
}

impl SynthConfig {
    pub fn papers(&self) -> usize {
        self.seeds + self.added + self.test
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub terms: Vec<(String, EntityType)>,
}

impl Vocabulary {
    pub fn of_type(&self, t: EntityType) -> Vec<&str> {
        self.terms.iter().filter(|(_, et)| *et == t).map(|(s, _)| s.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthCorpus {
    pub vocab: Vocabulary,
    /// Gold documents.
    pub docs: Vec<AnnotatedDocument>,
    pub manifest: PartitionManifest,
}

impl SynthCorpus {
    pub fn partition(&self, name: PartitionName) -> Vec<&AnnotatedDocument> {
        let Some(p) = self.manifest.get(name) else { return Vec::new() };
        self.docs.iter().filter(|d| p.contains(d.doc_id())).collect()
    }
}

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "ren", "tu", "vos", "zel", "dra", "qui", "bor", "fen", "gli", "nax", "pru", "sel", "tor", "vin", "wex", "yol",
    "zan", "cor", "dul", "esk", "hab", "jum",
];
const TASK_HEADS: &[&str] = &["parsing", "tagging", "retrieval", "detection", "generation", "segmentation", "linking", "ranking"];
const METHOD_HEADS: &[&str] = &["attention", "pooling", "regularization", "distillation", "sampling", "augmentation", "pruning"];

fn pseudo(rng: &mut ChaCha8Rng, min: usize, max: usize) -> String {
    let n = rng.random_range(min..=max);
    (0..n).map(|_| *SYLLABLES.choose(rng).expect("syllables")).collect()
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

fn term(rng: &mut ChaCha8Rng, t: EntityType) -> String {
    match t {
        EntityType::Model => format!("{}{}", capitalize(&pseudo(rng, 2, 3)), ["", "Net", "-XL", "former"][rng.random_range(0..4)]),
        EntityType::Method => format!("{} {}", pseudo(rng, 2, 2), METHOD_HEADS.choose(rng).expect("heads")),
        EntityType::Task => format!("{} {}", pseudo(rng, 2, 2), TASK_HEADS.choose(rng).expect("heads")),
        EntityType::Dataset => format!("{}-{}K", pseudo(rng, 2, 2).to_uppercase(), rng.random_range(1..100)),
        _ => format!("{}@{}", pseudo(rng, 2, 2), rng.random_range(1..20)),
    }
}

/// `size` distinct terms spread evenly over the five text types.
pub fn vocabulary(rng: &mut ChaCha8Rng, size: usize) -> Vocabulary {
    let mut seen = HashSet::new();
    let mut terms = Vec::with_capacity(size);
    for k in 0..size {
        let t = EntityType::TEXT[k % EntityType::TEXT.len()];
        loop {
            let s = term(rng, t);
            if seen.insert(gazetteer_key(&s)) {
                terms.push((s, t));
                break;
            }
        }
    }
    Vocabulary { terms }
}

const SINGLE: &[(&str, EntityType)] = &[
    ("We train {} on the benchmark .", EntityType::Model),
    ("{} outperforms the baseline by a wide margin .", EntityType::Model),
    ("We apply {} during training .", EntityType::Method),
    ("{} reduces overfitting in practice .", EntityType::Method),
    ("We study {} in this work .", EntityType::Task),
    ("Progress on {} has been rapid .", EntityType::Task),
    ("Experiments are conducted on {} .", EntityType::Dataset),
    ("{} contains thousands of labelled examples .", EntityType::Dataset),
    ("Performance is measured by {} .", EntityType::Metric),
    ("We report {} on the held-out split .", EntityType::Metric),
];
const FILLER: &[&str] = &[
    "Section two reviews related work .",
    "Implementation details follow .",
    "All code will be released .",
    "We thank the anonymous reviewers .",
];

struct Builder {
    sentences: Vec<Vec<String>>,
    spans: Vec<(Anchor, EntityType)>,
}

impl Builder {
    fn sentence(&mut self, template: &str, fills: &[(&str, EntityType)]) {
        let s = self.sentences.len();
        let mut words: Vec<String> = Vec::new();
        let mut fills = fills.iter();
        for piece in template.split_whitespace() {
            if piece == "{}" {
                let (surface, t) = fills.next().expect("one fill per slot");
                let l = words.len();
                words.extend(surface.split_whitespace().map(str::to_string));
                self.spans.push((Anchor::Text { s, l, r: words.len() }, *t));
            } else {
                words.push(piece.to_string());
            }
        }
        self.sentences.push(words);
    }
}

fn score_text(rng: &mut ChaCha8Rng) -> String {
    format!("{:.1}", rng.random_range(40.0..99.0))
}

/// A grid with its gold entities and related cell pairs.
type SynthTable = (TableGrid, Vec<(Anchor, EntityType)>, Vec<CellPairCoords>);

/// A results table: header `System` + metrics, one row per system. Every
/// score relates to its row and column header.
fn results_table(
    rng: &mut ChaCha8Rng,
    systems: &[(&str, EntityType)],
    metrics: &[&str],
    t: usize,
    score: &mut dyn FnMut(&mut ChaCha8Rng) -> String,
) -> SynthTable {
    let mut rows: Vec<Vec<String>> = vec![std::iter::once("System".to_string()).chain(metrics.iter().map(|m| m.to_string())).collect()];
    for (name, _) in systems {
        rows.push(std::iter::once(name.to_string()).chain(metrics.iter().map(|_| score(rng))).collect());
    }
    let grid = TableGrid::from_strings("Main results .", &rows);
    let cell = |i: usize, j: usize| Anchor::whole_cell(t, i, j, grid.cell(i, j).map_or(0, Vec::len));
    let mut ents = Vec::new();
    let mut rels = Vec::new();
    for (j, _) in metrics.iter().enumerate() {
        ents.push((cell(0, j + 1), EntityType::Metric));
    }
    for (i, (_, st)) in systems.iter().enumerate() {
        ents.push((cell(i + 1, 0), *st));
        for j in 0..metrics.len() {
            ents.push((cell(i + 1, j + 1), EntityType::Score));
            rels.push(((i + 1, 0), (i + 1, j + 1)));
            rels.push(((0, j + 1), (i + 1, j + 1)));
        }
    }
    (grid, ents, rels)
}

fn assemble(
    doc_id: &str,
    domain: DomainTag,
    b: Builder,
    tables: Vec<SynthTable>,
) -> AnnotatedDocument {
    let mut doc = ParsedDocument::new(doc_id, domain);
    let half = b.sentences.len() / 2;
    let mut sentences = b.sentences.into_iter();
    doc.sections.push(Section { title: "Introduction".into(), depth: 1, paragraphs: vec![sentences.by_ref().take(half).collect()] });
    doc.sections.push(Section { title: "Experiments".into(), depth: 1, paragraphs: vec![sentences.collect()] });
    doc.tables = tables.iter().map(|(g, _, _)| g.clone()).collect();
    let mut gold = AnnotatedDocument::new(doc, 0);
    for (anchor, t) in b.spans {
        let id = gold.next_entity_id();
        gold.entities.push(Entity::new(&gold.doc, id, anchor, t, Provenance::Reviewed).expect("synthetic anchor resolves"));
    }
    for (t, (_, ents, rels)) in tables.into_iter().enumerate() {
        let mut by_cell = BTreeMap::new();
        for (anchor, et) in ents {
            let id = gold.next_entity_id();
            by_cell.insert(anchor.cell().expect("cell anchor"), id);
            gold.entities.push(Entity::new(&gold.doc, id, anchor, et, Provenance::Reviewed).expect("synthetic anchor resolves"));
        }
        for (a, b) in rels {
            gold.relations.push(TableRelation::new(by_cell[&a], by_cell[&b], t, Provenance::Reviewed));
        }
    }
    gold.review_state = ReviewState::Gold;
    gold
}

fn domain_for(k: usize) -> DomainTag {
    match k % 5 {
        3 => DomainTag::Stat,
        4 => DomainTag::Eess,
        _ => DomainTag::Cs,
    }
}

fn paper(rng: &mut ChaCha8Rng, vocab: &Vocabulary, doc_id: &str, domain: DomainTag) -> AnnotatedDocument {
    let mut pool_of = |t: EntityType, n: usize| -> Vec<(String, EntityType)> {
        vocab.of_type(t).choose_multiple(rng, n).map(|s| (s.to_string(), t)).collect()
    };
    let models = pool_of(EntityType::Model, 2);
    let methods = pool_of(EntityType::Method, 1);
    let metrics = pool_of(EntityType::Metric, 2);
    let datasets = pool_of(EntityType::Dataset, 1);
    let tasks = pool_of(EntityType::Task, 1);

    let mut b = Builder { sentences: Vec::new(), spans: Vec::new() };
    let mut plan: Vec<(&str, Vec<(&str, EntityType)>)> = Vec::new();
    for (s, t) in models.iter().chain(&methods).chain(&metrics).chain(&datasets).chain(&tasks) {
        let templates: Vec<&str> = SINGLE.iter().filter(|(_, tt)| tt == t).map(|(x, _)| *x).collect();
        for tpl in templates.choose_multiple(rng, 2) {
            plan.push((tpl, vec![(s.as_str(), *t)]));
        }
    }
    plan.push((
        "We evaluate {} on {} with {} .",
        vec![(models[0].0.as_str(), EntityType::Model), (datasets[0].0.as_str(), EntityType::Dataset), (metrics[0].0.as_str(), EntityType::Metric)],
    ));
    for f in FILLER.choose_multiple(rng, 2) {
        plan.push((f, Vec::new()));
    }
    plan.shuffle(rng);
    for (tpl, fills) in &plan {
        b.sentence(tpl, fills);
    }

    let systems: Vec<(&str, EntityType)> = models.iter().chain(&methods).map(|(s, t)| (s.as_str(), *t)).collect();
    let metric_names: Vec<&str> = metrics.iter().map(|(s, _)| s.as_str()).collect();
    let table = results_table(rng, &systems, &metric_names, 0, &mut score_text);
    assemble(doc_id, domain, b, vec![table])
}

/// The default corpus: `seeds + added + test` papers drawn from one
/// vocabulary. Each paper mentions two models, a method, two metrics, a
/// dataset and a task in text and has one results table.
pub fn synth_corpus(cfg: &SynthConfig) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vocab = vocabulary(&mut rng, cfg.vocab_size);
    let mut docs = Vec::new();
    for k in 0..cfg.papers() {
        let id = format!("synth-{:03}", k);
        docs.push(paper(&mut rng, &vocab, &id, domain_for(k)));
    }
    let mut manifest = PartitionManifest::default();
    let mut start = 0;
    for (name, n) in [(PartitionName::Seeds, cfg.seeds), (PartitionName::Added, cfg.added), (PartitionName::Test, cfg.test)] {
        let mut p = CorpusPartition::new(name);
        p.expected_size = Some(n);
        for d in &docs[start..start + n] {
            p.push(d.doc_id(), d.doc.domain_tag);
        }
        start += n;
        manifest.insert(p).expect("partitions are disjoint by construction");
    }
    SynthCorpus { vocab, docs, manifest }
}

/// Score formats of the imbalance corpus. Only the first two match the
/// heuristic score pattern.
pub const SCORE_FORMATS: [&str; 4] = ["plain", "slash", "plusminus", "dagger"];

fn varied_score(rng: &mut ChaCha8Rng) -> String {
    let v = rng.random_range(40.0..99.0);
    match rng.random_range(0..4) {
        0 => format!("{v:.1}"),
        1 => format!("{v:.1}/{:.1}", v - 0.6),
        2 => format!("{v:.1}±{:.1}", rng.random_range(0.1..0.9)),
        _ => format!("{v:.1}†"),
    }
}

/// `n` table-only documents whose table entities are exactly 60% Score:
/// each has a 4×4 grid with three systems and three metrics, so 9 of its
/// 15 entities are scores.
pub fn imbalance_corpus(seed: u64, n: usize) -> (Vocabulary, Vec<AnnotatedDocument>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = vocabulary(&mut rng, 60);
    let mut docs = Vec::new();
    for k in 0..n {
        let systems: Vec<(&str, EntityType)> = vocab.of_type(EntityType::Model).choose_multiple(&mut rng, 3).map(|s| (*s, EntityType::Model)).collect();
        let metrics: Vec<&str> = vocab.of_type(EntityType::Metric).choose_multiple(&mut rng, 3).copied().collect();
        let table = results_table(&mut rng, &systems, &metrics, 0, &mut varied_score);
        let b = Builder { sentences: vec![vec!["Results".into(), "follow".into(), ".".into()]], spans: Vec::new() };
        docs.push(assemble(&format!("imb-{k:03}"), DomainTag::Cs, b, vec![table]));
    }
    (vocab, docs)
}

/// Corrections a perfect reviewer would submit to turn `auto` into `gold`:
/// removals, then additions, then relation fixes.
pub fn review_corrections(auto: &AnnotatedDocument, gold: &AnnotatedDocument) -> Vec<Correction> {
    let gold_keys: BTreeSet<(Anchor, EntityType)> = gold.entities.iter().map(|e| (e.anchor, e.etype)).collect();
    let auto_keys: BTreeSet<(Anchor, EntityType)> = auto.entities.iter().map(|e| (e.anchor, e.etype)).collect();
    let mut out: Vec<Correction> = auto
        .entities
        .iter()
        .filter(|e| !gold_keys.contains(&(e.anchor, e.etype)))
        .map(|e| Correction::Remove { id: e.id })
        .collect();
    out.extend(
        gold.entities
            .iter()
            .filter(|e| !auto_keys.contains(&(e.anchor, e.etype)))
            .map(|e| Correction::Add { anchor: e.anchor, etype: e.etype }),
    );
    let Ok(mid) = apply_corrections(auto, auto.version, &out) else { return out };
    let id_of: BTreeMap<(Anchor, EntityType), EntityId> = mid.entities.iter().map(|e| ((e.anchor, e.etype), e.id)).collect();
    let rel_key = |d: &AnnotatedDocument, r: &TableRelation| -> Option<BTreeSet<(Anchor, EntityType)>> {
        let a = d.entity(r.e1)?;
        let b = d.entity(r.e2)?;
        Some([(a.anchor, a.etype), (b.anchor, b.etype)].into_iter().collect())
    };
    let gold_rels: BTreeSet<_> = gold.relations.iter().filter_map(|r| rel_key(gold, r)).collect();
    let mid_rels: BTreeSet<_> = mid.relations.iter().filter_map(|r| rel_key(&mid, r)).collect();
    for r in &mid.relations {
        if rel_key(&mid, r).is_some_and(|k| !gold_rels.contains(&k)) {
            out.push(Correction::RemoveRel { e1: r.e1, e2: r.e2 });
        }
    }
    for k in gold_rels.difference(&mid_rels) {
        let ids: Vec<EntityId> = k.iter().filter_map(|x| id_of.get(x).copied()).collect();
        if let [a, b] = ids[..] {
            out.push(Correction::AddRel { e1: a, e2: b });
        }
    }
    out
}

/// Scores of one round's extractors on the test partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundScore {
    pub round: u32,
    pub train_docs: usize,
    pub report: EvalReport,
}

/// Evaluates round `index`'s gazetteer and heuristic backends on `test`.
pub fn score_round(ws: &Workspace, index: u32, test: &[&AnnotatedDocument], cfg: &TableConfig) -> Result<EvalReport, PipelineError> {
    let (text, table) = load_gazetteers(ws, index)?;
    let table = HeuristicTableBackend::new(table);
    let mut preds = Vec::new();
    for g in test {
        preds.push(annotate_document(&g.doc, &text, &table, cfg, index)?);
    }
    let gold: Vec<AnnotatedDocument> = test.iter().map(|d| (*d).clone()).collect();
    Ok(evaluate(&gold, &preds, &EvalOptions { per_domain: true, ..Default::default() }))
}

/// Runs the loop end to end in `ws`: seeds are gold, round 1 trains on
/// them, the added papers are auto-annotated and corrected by a perfect
/// reviewer through the review log, round 2 trains on both. Returns the
/// test scores after each round.
pub fn run_two_rounds(ws: &Workspace, corpus: &SynthCorpus) -> Result<Vec<RoundScore>, PipelineError> {
    ws.save_manifest(&corpus.manifest)?;
    for d in &corpus.docs {
        ws.save_parsed(&d.doc)?;
    }
    for d in corpus.partition(PartitionName::Seeds) {
        ws.save_annotation(d)?;
    }
    let test = corpus.partition(PartitionName::Test);
    let cfg = TableConfig::default();
    let mut scores = Vec::new();

    let r1 = advance_round(ws)?;
    scores.push(RoundScore { round: r1.index, train_docs: r1.train_doc_ids.len(), report: score_round(ws, r1.index, &test, &cfg)? });

    let added = corpus.partition(PartitionName::Added);
    let ids: Vec<String> = added.iter().map(|d| d.doc_id().to_string()).collect();
    let (text, table) = load_gazetteers(ws, r1.index)?;
    let table = HeuristicTableBackend::new(table);
    let report = run_stage1(ws, &ids, &text, &table, &Stage1Options { round: r1.index, table: cfg, workers: 4 })?;
    if let Some(f) = report.failures.first() {
        return Err(PipelineError::Training(format!("stage 1 failed on {}: {}", f.doc_id, f.error)));
    }
    for gold in &added {
        let id = gold.doc_id();
        review::claim(ws, id, "sim")?;
        let auto = ws.load_annotation(id)?;
        let doc = review::patch(ws, id, Some("sim"), auto.version, review_corrections(&auto, gold))?;
        review::complete(ws, id, Some("sim"), doc.version)?;
    }

    let r2 = advance_round(ws)?;
    scores.push(RoundScore { round: r2.index, train_docs: r2.train_doc_ids.len(), report: score_round(ws, r2.index, &test, &cfg)? });
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::validate;

    #[test]
    fn deterministic_and_sized() {
        let cfg = SynthConfig::default();
        let a = synth_corpus(&cfg);
        assert_eq!(a, synth_corpus(&cfg));
        assert_eq!(a.vocab.terms.len(), 200);
        assert_eq!(a.docs.len(), 50);
        assert_eq!(a.partition(PartitionName::Test).len(), 10);
        let keys: BTreeSet<String> = a.vocab.terms.iter().map(|(s, _)| gazetteer_key(s)).collect();
        assert_eq!(keys.len(), 200);
        assert_ne!(a, synth_corpus(&SynthConfig { seed: 8, ..cfg }));
    }

    #[test]
    fn gold_is_valid() {
        for d in synth_corpus(&SynthConfig::default()).docs.iter().chain(&imbalance_corpus(1, 5).1) {
            let r = validate(d);
            assert!(!r.has_errors(), "{}: {:?}", d.doc_id(), r.errors().collect::<Vec<_>>());
        }
    }

    #[test]
    fn imbalance_is_sixty_percent() {
        let (_, docs) = imbalance_corpus(3, 7);
        let scores = docs.iter().flat_map(|d| d.table_entities()).filter(|e| e.etype == EntityType::Score).count();
        let total: usize = docs.iter().map(|d| d.table_entities().count()).sum();
        assert_eq!((scores, total), (63, 105));
    }

    #[test]
    fn perfect_reviewer_reaches_gold() {
        let corpus = synth_corpus(&SynthConfig::default());
        let gold = &corpus.docs[0];
        let mut auto = AnnotatedDocument::new(gold.doc.clone(), 1);
        // Half right, plus one wrong type.
        for e in gold.entities.iter().step_by(2) {
            auto.entities.push(Entity { provenance: Provenance::Auto, ..e.clone() });
        }
        if let Some(e) = auto.entities.iter_mut().find(|e| e.etype == EntityType::Model) {
            e.etype = EntityType::Method;
        }
        let fixed = crate::pipeline::merge_review(&auto, 0, &review_corrections(&auto, gold)).unwrap();
        let keys = |d: &AnnotatedDocument| d.entities.iter().map(|e| (e.anchor, e.etype)).collect::<BTreeSet<_>>();
        assert_eq!(keys(&fixed), keys(gold));
        assert_eq!(fixed.relations.len(), gold.relations.len());
    }
}
