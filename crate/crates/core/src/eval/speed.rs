use crate::backend::ExtractError;
use crate::docmodel::Entity;
use crate::latex::{DomainTag, ParsedDocument, Section, Sentence, TableGrid};
use crate::table::{classify_cells, relate_cells, TableConfig, TableExtractor};
use crate::text::TextExtractor;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const DEFAULT_BATCH: usize = 32;

/// Items processed over timed wall seconds. `per_second` is absent when
/// nothing was processed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Throughput {
    pub items: usize,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_second: Option<f64>,
}

impl Throughput {
    pub fn new(items: usize, seconds: f64) -> Self {
        let per_second = (items > 0 && seconds > 0.0).then(|| items as f64 / seconds);
        Throughput { items, seconds, per_second }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedReport {
    pub batch: usize,
    pub hardware: String,
    /// Sentences per second.
    pub text: Throughput,
    /// Tables per second.
    pub table_ner: Throughput,
    /// Tables per second.
    pub table_re: Throughput,
}

/// Runs `run` over `items` in batches of `batch` after one untimed
/// warm-up batch, counting `units(chunk)` items per batch.
pub fn time_batches<T>(
    items: &[T],
    batch: usize,
    units: impl Fn(&[T]) -> usize,
    mut run: impl FnMut(&[T]) -> Result<(), ExtractError>,
) -> Result<Throughput, ExtractError> {
    let batch = batch.max(1);
    if items.is_empty() {
        return Ok(Throughput::new(0, 0.0));
    }
    run(&items[..batch.min(items.len())])?;
    let mut n = 0;
    let start = Instant::now();
    for chunk in items.chunks(batch) {
        run(chunk)?;
        n += units(chunk);
    }
    Ok(Throughput::new(n, start.elapsed().as_secs_f64()))
}

fn batch_doc(sentences: &[Sentence]) -> ParsedDocument {
    let mut d = ParsedDocument::new("speed-batch", DomainTag::Other);
    d.sections.push(Section { title: String::new(), depth: 1, paragraphs: vec![sentences.to_vec()] });
    d
}

/// Single-pipeline throughput of text NER (sentences/s), table NER and
/// table RE (tables/s). RE is timed on entities produced by an untimed NER
/// pass.
pub fn measure_speed(
    docs: &[ParsedDocument],
    text: &dyn TextExtractor,
    table: &dyn TableExtractor,
    cfg: &TableConfig,
    batch: usize,
) -> Result<SpeedReport, ExtractError> {
    let sentences: Vec<Sentence> = docs.iter().flat_map(|d| d.sentences().into_iter().cloned()).collect();
    let text_tp = time_batches(&sentences, batch, <[Sentence]>::len, |chunk| {
        text.extract_text(&batch_doc(chunk)).map(drop)
    })?;

    let grids: Vec<&TableGrid> = docs.iter().flat_map(|d| d.tables.iter()).collect();
    let ner_tp = time_batches(&grids, batch, <[&TableGrid]>::len, |chunk| {
        for g in chunk {
            classify_cells(g, 0, table, cfg)?;
        }
        Ok(())
    })?;

    let classified: Vec<(&TableGrid, Vec<Entity>)> =
        grids.iter().map(|g| Ok((*g, classify_cells(g, 0, table, cfg)?))).collect::<Result<_, ExtractError>>()?;
    let re_tp = time_batches(&classified, batch, <[(&TableGrid, Vec<Entity>)]>::len, |chunk| {
        for (g, ents) in chunk {
            relate_cells(g, 0, ents, table, cfg)?;
        }
        Ok(())
    })?;

    Ok(SpeedReport { batch, hardware: hardware_summary(), text: text_tp, table_ner: ner_tp, table_re: re_tp })
}

/// CPU model, OS, architecture and logical core count.
pub fn hardware_summary() -> String {
    let cpu = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| s.lines().find(|l| l.starts_with("model name")).and_then(|l| l.split(':').nth(1)).map(|m| m.trim().to_string()))
        .unwrap_or_else(|| "unknown cpu".into());
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!("{cpu}; {} {}; {cores} logical cores", std::env::consts::OS, std::env::consts::ARCH)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latex::split_words;
    use crate::table::HeuristicTableBackend;
    use crate::text::Gazetteer;
    use std::cell::Cell;

    #[test]
    fn exact_accounting() {
        let items: Vec<u32> = (0..320).collect();
        let calls = Cell::new(0);
        let sizes = std::cell::RefCell::new(Vec::new());
        let tp = time_batches(&items, 32, <[u32]>::len, |c| {
            calls.set(calls.get() + 1);
            sizes.borrow_mut().push(c.len());
            Ok(())
        })
        .unwrap();
        assert_eq!(tp.items, 320);
        assert_eq!(calls.get(), 11);
        assert!(sizes.borrow()[1..].iter().all(|&n| n == 32));
        assert_eq!(tp.per_second, Some(320.0 / tp.seconds));
    }

    #[test]
    fn nothing_to_time() {
        let tp = time_batches::<u8>(&[], 32, <[u8]>::len, |_| Ok(())).unwrap();
        assert_eq!(tp.per_second, None);
        assert!(!serde_json::to_string(&tp).unwrap().contains("per_second"));
    }

    #[test]
    fn heuristic_pipeline() {
        let mut d = ParsedDocument::new("d", DomainTag::Cs);
        d.sections.push(Section { title: String::new(), depth: 1, paragraphs: vec![vec![split_words("We use BERT ."); 40]] });
        d.tables.push(TableGrid::from_strings("", &[vec!["System", "F1"], vec!["BERT", "92.2"]]));
        let mut g = Gazetteer::new();
        g.add("BERT", crate::docmodel::EntityType::Model);
        let table = HeuristicTableBackend::new(g.clone());
        let r = measure_speed(&[d], &g, &table, &TableConfig::default(), DEFAULT_BATCH).unwrap();
        assert_eq!(r.text.items, 40);
        assert_eq!(r.table_ner.items, 1);
        assert!(r.text.per_second.unwrap() > 0.0);
        assert!(r.table_re.per_second.unwrap() > 0.0);
    }
}
