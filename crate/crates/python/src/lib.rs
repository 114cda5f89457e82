//! Python bindings. Documents and reports cross the boundary as JSON
//! strings in the same shapes the workspace files use.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use scimine_core::docmodel::{read_jsonl, validate as validate_doc, write_jsonl, AnnotatedDocument};
use scimine_core::eval::{evaluate as evaluate_docs, EvalOptions};
use scimine_core::latex::{parse_document_with_domain, DomainTag, SourceArchive, TableGrid};
use scimine_core::llm::{build_prompt, parse_table_ner, parse_table_re, render_table, LlmTask, DEFAULT_CONTEXT_CHARS};
use scimine_core::synth::{synth_corpus, SynthConfig};
use scimine_core::table::flatten_table;

/// A cell's `(row, col)` and its `(start, end)` byte range.
type CellSpan = ((usize, usize), (usize, usize));

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(value_err)
}

fn grid(json: &str) -> PyResult<TableGrid> {
    serde_json::from_str(json).map_err(value_err)
}

fn docs(jsonl: &str) -> PyResult<Vec<AnnotatedDocument>> {
    read_jsonl(jsonl.as_bytes()).map_err(value_err)
}

/// Parses one LaTeX source; returns `{document, diagnostics}` as JSON.
#[pyfunction]
#[pyo3(signature = (arxiv_id, tex, domain = "OTHER"))]
fn parse_tex(arxiv_id: &str, tex: &str, domain: &str) -> PyResult<String> {
    let domain: DomainTag = domain.parse().map_err(value_err)?;
    let archive = SourceArchive::from_tex(arxiv_id, tex).map_err(value_err)?;
    to_json(&parse_document_with_domain(&archive, domain))
}

/// Parses a downloaded e-print payload (gzip, tar.gz or plain TeX).
#[pyfunction]
#[pyo3(signature = (arxiv_id, payload, domain = "OTHER"))]
fn parse_payload(arxiv_id: &str, payload: &[u8], domain: &str) -> PyResult<String> {
    let domain: DomainTag = domain.parse().map_err(value_err)?;
    let archive = SourceArchive::from_payload(arxiv_id, payload).map_err(value_err)?;
    to_json(&parse_document_with_domain(&archive, domain))
}

/// Linear text of a table grid and the character span of every cell.
#[pyfunction]
fn flatten(grid_json: &str) -> PyResult<(String, Vec<CellSpan>)> {
    let flat = flatten_table(&grid(grid_json)?);
    let spans = flat.coord_spans.iter().enumerate().map(|(k, r)| ((k / flat.cols, k % flat.cols), (r.start, r.end))).collect();
    Ok((flat.text, spans))
}

/// Few-shot prompt for `task` ("text-ner", "table-ner" or "table-re").
#[pyfunction]
#[pyo3(signature = (task, shots, payload, include_score = true))]
fn prompt(task: &str, shots: u8, payload: &str, include_score: bool) -> PyResult<String> {
    let task: LlmTask = task.parse().map_err(value_err)?;
    Ok(build_prompt(task, shots, payload, include_score, DEFAULT_CONTEXT_CHARS).map_err(value_err)?.text)
}

/// A grid rendered for a table prompt.
#[pyfunction]
fn table_payload(grid_json: &str) -> PyResult<String> {
    Ok(render_table(&grid(grid_json)?))
}

/// Reads a model's table NER answer against the grid it was asked about.
#[pyfunction]
#[pyo3(signature = (answer, grid_json, include_score = true))]
fn read_table_ner(answer: &str, grid_json: &str, include_score: bool) -> PyResult<String> {
    to_json(&parse_table_ner(answer, &grid(grid_json)?, 0, include_score))
}

/// Reads a model's table RE answer against the grid it was asked about.
#[pyfunction]
fn read_table_re(answer: &str, grid_json: &str) -> PyResult<String> {
    to_json(&parse_table_re(answer, &grid(grid_json)?))
}

/// Strict-match scores of predicted against gold documents, both JSONL.
#[pyfunction]
#[pyo3(signature = (gold_jsonl, pred_jsonl, per_domain = false, errors = false))]
fn evaluate(gold_jsonl: &str, pred_jsonl: &str, per_domain: bool, errors: bool) -> PyResult<String> {
    let opts = EvalOptions { per_domain, errors, strict_re_types: false };
    to_json(&evaluate_docs(&docs(gold_jsonl)?, &docs(pred_jsonl)?, &opts))
}

/// Guideline findings for one annotated document.
#[pyfunction]
fn validate(doc_json: &str) -> PyResult<String> {
    let doc: AnnotatedDocument = serde_json::from_str(doc_json).map_err(value_err)?;
    to_json(&validate_doc(&doc))
}

/// A seeded synthetic gold corpus as JSONL.
#[pyfunction]
#[pyo3(signature = (seed = 7))]
fn synth(seed: u64) -> PyResult<String> {
    let corpus = synth_corpus(&SynthConfig { seed, ..Default::default() });
    let mut out = Vec::new();
    write_jsonl(&mut out, &corpus.docs).map_err(value_err)?;
    String::from_utf8(out).map_err(value_err)
}

#[pymodule]
fn scimine(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(parse_tex, m)?)?;
    m.add_function(wrap_pyfunction!(parse_payload, m)?)?;
    m.add_function(wrap_pyfunction!(flatten, m)?)?;
    m.add_function(wrap_pyfunction!(prompt, m)?)?;
    m.add_function(wrap_pyfunction!(table_payload, m)?)?;
    m.add_function(wrap_pyfunction!(read_table_ner, m)?)?;
    m.add_function(wrap_pyfunction!(read_table_re, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    Ok(())
}
