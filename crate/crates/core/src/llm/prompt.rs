use super::templates::*;
use super::LlmError;
use crate::latex::TableGrid;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default prompt size limit in characters.
pub const DEFAULT_CONTEXT_CHARS: usize = 16_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlmTask {
    TextNer,
    TableNer,
    TableRe,
}

impl LlmTask {
    pub fn as_str(self) -> &'static str {
        match self {
            LlmTask::TextNer => "text-ner",
            LlmTask::TableNer => "table-ner",
            LlmTask::TableRe => "table-re",
        }
    }
}

impl fmt::Display for LlmTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LlmTask {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('_', "-").as_str() {
            "text-ner" => Ok(LlmTask::TextNer),
            "table-ner" => Ok(LlmTask::TableNer),
            "table-re" => Ok(LlmTask::TableRe),
            _ => Err(format!("unknown task `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub task: LlmTask,
    pub shots: u8,
    /// Only meaningful for table NER.
    pub include_score: bool,
    pub text: String,
}

/// Sentences for the `Sentences:` slot, joined by single spaces.
pub fn render_sentences<S: AsRef<[String]>>(sentences: &[S]) -> String {
    sentences
        .iter()
        .map(|s| s.as_ref().join(" "))
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// A grid as a list of row lists of quoted cells, e.g.
/// `[['System', 'F1'], ['BERT', '92.2']]`. Cells containing a single
/// quote are double-quoted.
pub fn render_table(grid: &TableGrid) -> String {
    let rows: Vec<String> = (0..grid.rows)
        .map(|i| {
            let cells: Vec<String> = (0..grid.cols)
                .map(|j| {
                    let t = grid.cell_text(i, j);
                    if t.contains('\'') {
                        format!("\"{t}\"")
                    } else {
                        format!("'{t}'")
                    }
                })
                .collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn demo_header(shots: u8) -> &'static str {
    if shots == 1 {
        ONE_DEMO_HEADER
    } else {
        TWO_DEMOS_HEADER
    }
}

/// Instantiates the few-shot template for `task` with the first `shots`
/// demonstrations and `payload` in the query slot: rendered sentences for
/// text NER, a rendered table for the table tasks. `include_score` only
/// affects table NER. Fails when the prompt exceeds `context_chars`.
pub fn build_prompt(
    task: LlmTask,
    shots: u8,
    payload: &str,
    include_score: bool,
    context_chars: usize,
) -> Result<PromptBundle, LlmError> {
    if !(1..=2).contains(&shots) {
        return Err(LlmError::BadShots(shots));
    }
    let n = shots as usize;
    let mut blocks: Vec<String> = Vec::new();
    match task {
        LlmTask::TextNer => {
            blocks.push(TEXT_NER_INTRO.to_string());
            blocks.push(demo_header(shots).to_string());
            for d in &TEXT_NER_DEMOS[..n] {
                blocks.push(text_ner_block(d.payload, Some(d.answer)));
            }
            blocks.push(text_ner_block(payload, None));
        }
        LlmTask::TableNer => {
            blocks.push(table_ner_intro(include_score));
            blocks.push(demo_header(shots).to_string());
            let question = table_ner_question(include_score);
            let type_set = table_ner_type_set(include_score);
            for (table, answer) in &table_ner_demos(include_score)[..n] {
                blocks.push(format!(
                    "Given type set: {type_set}.\nTable: {table}\nQuestion: {question}\nEntities: {answer}"
                ));
            }
            blocks.push(format!(
                "Given type set: {}.\nTable: {payload}\nQuestion: {question}\nEntities:",
                table_ner_query_type_set(include_score)
            ));
        }
        LlmTask::TableRe => {
            blocks.push(TABLE_RE_INTRO.to_string());
            blocks.push(demo_header(shots).to_string());
            for (table, answer) in &table_re_demos()[..n] {
                blocks.push(format!("Table: {table}\nQuestion: {TABLE_RE_QUESTION}\nRelations: {answer}"));
            }
            blocks.push(format!("Table: {payload}\nQuestion: {TABLE_RE_QUERY_QUESTION}\nEntities:"));
        }
    }
    let text = blocks.join("\n\n");
    if text.len() > context_chars {
        return Err(LlmError::PayloadTooLarge {
            size: text.len(),
            limit: context_chars,
        });
    }
    Ok(PromptBundle {
        task,
        shots,
        include_score: include_score && task == LlmTask::TableNer,
        text,
    })
}

fn text_ner_block(sentences: &str, answer: Option<&str>) -> String {
    let head = format!("Given type set: {TEXT_NER_TYPE_SET}.\nSentences: {sentences}\nQuestion: {TEXT_NER_QUESTION}\nEntities:");
    match answer {
        Some(a) => format!("{head} {a}"),
        None => head,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_type_set_line() {
        let p = build_prompt(LlmTask::TextNer, 2, "We use BERT .", false, DEFAULT_CONTEXT_CHARS).unwrap();
        assert!(p.text.contains("\nGiven type set: [Task, Model, Method, Dataset, Metric].\nSentences: We use BERT .\n"));
        assert!(p.text.ends_with("Entities:"));
        let again = build_prompt(LlmTask::TextNer, 2, "We use BERT .", false, DEFAULT_CONTEXT_CHARS).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn table_ner_without_score_keys() {
        let p = build_prompt(LlmTask::TableNer, 1, "[['a']]", false, DEFAULT_CONTEXT_CHARS).unwrap();
        assert!(!p.text.contains("Score"));
        assert!(p.text.contains("{'Task': [list of entities], 'Dataset': [list of entities], 'Model': [list of entities], 'Method': [list of entities], 'Metric': [list of entities], 'Setting': [list of entities]}"));
        let s = build_prompt(LlmTask::TableNer, 1, "[['a']]", true, DEFAULT_CONTEXT_CHARS).unwrap();
        assert!(s.text.contains("'Score': [list of entities]}"));
    }

    #[test]
    fn too_large_and_bad_shots() {
        let big = "x ".repeat(20_000);
        assert!(matches!(build_prompt(LlmTask::TextNer, 1, &big, false, DEFAULT_CONTEXT_CHARS), Err(LlmError::PayloadTooLarge { .. })));
        assert_eq!(build_prompt(LlmTask::TableRe, 3, "", false, DEFAULT_CONTEXT_CHARS), Err(LlmError::BadShots(3)));
    }

    #[test]
    fn table_rendering() {
        let g = TableGrid::from_strings("", &[vec!["System", "F1"], vec!["it's", "92.2"]]);
        assert_eq!(render_table(&g), "[['System', 'F1'], [\"it's\", '92.2']]");
    }
}
