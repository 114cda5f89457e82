//! LaTeX source ingestion: arXiv archive fetching, parsing into a
//! text + table document model, and table cell cleaning.

mod archive;
mod clean;
mod fetch;
mod parse;
mod scan;
mod sentences;

pub use archive::{is_valid_arxiv_id, SourceArchive};
pub use clean::{clean_cell_text, clean_table};
pub use fetch::{fetch_source, Fetcher, ARXIV_BASE_URL};
pub use parse::{parse_document, parse_document_with_domain, ParseOutput, MAX_INPUT_DEPTH};
pub use sentences::{split_sentences, split_words};

use serde::{Deserialize, Serialize};
use std::fmt;

pub const PARSED_DOCUMENT_SCHEMA: &str = "parsed_document.v1";

#[derive(Debug, thiserror::Error)]
pub enum LatexError {
    #[error("invalid arXiv identifier `{0}`")]
    InvalidId(String),
    #[error("arXiv id `{0}` not found")]
    NotFound(String),
    #[error("arXiv id `{0}` has no LaTeX source")]
    NoSource(String),
    #[error("network error: {0}")]
    Network(String),
    #[error("archive has no main .tex file")]
    NoMainTex,
    #[error("archive decode error: {0}")]
    Archive(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Subject area a paper was collected from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "UPPERCASE")]
pub enum DomainTag {
    Cs,
    Stat,
    Eess,
    Physics,
    Math,
    #[default]
    Other,
}

impl DomainTag {
    pub const ALL: [DomainTag; 6] = [
        DomainTag::Cs,
        DomainTag::Stat,
        DomainTag::Eess,
        DomainTag::Physics,
        DomainTag::Math,
        DomainTag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DomainTag::Cs => "CS",
            DomainTag::Stat => "STAT",
            DomainTag::Eess => "EESS",
            DomainTag::Physics => "PHYSICS",
            DomainTag::Math => "MATH",
            DomainTag::Other => "OTHER",
        }
    }
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DomainTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DomainTag::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown domain `{s}`"))
    }
}

pub type Sentence = Vec<String>;
pub type Paragraph = Vec<Sentence>;
pub type Cell = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub depth: u8,
    pub paragraphs: Vec<Paragraph>,
}

/// A block of cells covered by one `\multicolumn` / `\multirow`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MergedRegion {
    pub row_span: usize,
    pub col_span: usize,
    /// Top-left coordinate `(row, col)`, 0-based.
    pub anchor: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableGrid {
    pub caption: String,
    pub rows: usize,
    pub cols: usize,
    /// Row-major, `rows` rows of `cols` cells each.
    pub cells: Vec<Vec<Cell>>,
    #[serde(default)]
    pub merged_regions: Vec<MergedRegion>,
}

impl TableGrid {
    /// Builds a grid from cell strings, splitting each on whitespace and
    /// padding short rows so the grid is rectangular.
    pub fn from_strings<S: AsRef<str>>(caption: &str, rows: &[Vec<S>]) -> Self {
        let cols = rows.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let mut cells: Vec<Vec<Cell>> = rows
            .iter()
            .map(|r| {
                let mut row: Vec<Cell> = r.iter().map(|c| split_words(c.as_ref())).collect();
                row.resize(cols, Vec::new());
                row
            })
            .collect();
        if cells.is_empty() {
            cells.push(vec![Vec::new(); cols]);
        }
        TableGrid {
            caption: caption.to_string(),
            rows: cells.len(),
            cols,
            cells,
            merged_regions: Vec::new(),
        }
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&Cell> {
        self.cells.get(row).and_then(|r| r.get(col))
    }

    /// Cell words joined by single spaces.
    pub fn cell_text(&self, row: usize, col: usize) -> String {
        self.cell(row, col).map(|c| c.join(" ")).unwrap_or_default()
    }

    /// Row-major iteration over every coordinate.
    pub fn coords(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |i| (0..self.cols).map(move |j| (i, j)))
    }

    pub fn is_rectangular(&self) -> bool {
        self.rows >= 1
            && self.cols >= 1
            && self.cells.len() == self.rows
            && self.cells.iter().all(|r| r.len() == self.cols)
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }
}

/// A paper as ordered sections plus its tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedDocument {
    #[serde(default = "parsed_schema")]
    pub schema: String,
    pub doc_id: String,
    pub domain_tag: DomainTag,
    pub sections: Vec<Section>,
    pub tables: Vec<TableGrid>,
}

fn parsed_schema() -> String {
    PARSED_DOCUMENT_SCHEMA.to_string()
}

impl ParsedDocument {
    pub fn new(doc_id: impl Into<String>, domain_tag: DomainTag) -> Self {
        ParsedDocument {
            schema: parsed_schema(),
            doc_id: doc_id.into(),
            domain_tag,
            sections: Vec::new(),
            tables: Vec::new(),
        }
    }

    /// All sentences in reading order. The position in this list is the
    /// dense sentence index used by text anchors.
    pub fn sentences(&self) -> Vec<&Sentence> {
        self.sections
            .iter()
            .flat_map(|s| s.paragraphs.iter())
            .flat_map(|p| p.iter())
            .collect()
    }

    pub fn sentence(&self, idx: usize) -> Option<&Sentence> {
        self.sections
            .iter()
            .flat_map(|s| s.paragraphs.iter())
            .flat_map(|p| p.iter())
            .nth(idx)
    }

    pub fn sentence_count(&self) -> usize {
        self.sections
            .iter()
            .flat_map(|s| s.paragraphs.iter())
            .map(Vec::len)
            .sum()
    }

    pub fn word_count(&self) -> usize {
        self.sections
            .iter()
            .flat_map(|s| s.paragraphs.iter())
            .flat_map(|p| p.iter())
            .map(Vec::len)
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// A non-fatal problem found while parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub offset: usize,
    pub message: String,
}
