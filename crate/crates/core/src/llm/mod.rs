//! Few-shot prompting: prompt templates, a chat-completion client and
//! readers that turn answers back into annotations.

mod client;
mod extract;
mod parse;
mod prompt;
pub mod templates;

pub use client::{ChatClient, Completer, LlmConfig, DEFAULT_MODEL, ENV_KEY, ENV_MODEL, ENV_URL};
pub use extract::{sentence_chunks, LlmTableExtractor, LlmTextExtractor};
pub use parse::{
    matching_cells, parse_table_ner, parse_table_re, parse_text_ner, quote, render_table_ner, render_table_re,
    render_text_ner, table_ner_keys, CellPairCoords, IssueKind, ParseIssue, ParsedResponse, RawItem,
};
pub use prompt::{build_prompt, render_sentences, render_table, LlmTask, PromptBundle, DEFAULT_CONTEXT_CHARS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("shots must be 1 or 2, got {0}")]
    BadShots(u8),
    #[error("prompt of {size} chars exceeds the {limit} char budget")]
    PayloadTooLarge { size: usize, limit: usize },
}
