use crate::latex::TableGrid;
use serde::{Deserialize, Serialize};
use std::ops::Range;

pub const CAP_MARK: &str = "[CAP]";
pub const SEP_MARK: &str = "[SEP]";
pub const ROW_MARK: &str = "[ROW]";

/// A table serialized as `<caption> [CAP] c11 [SEP] c12 [ROW] c21 ...`,
/// with the byte range of every cell in `text`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatTable {
    pub text: String,
    pub rows: usize,
    pub cols: usize,
    /// Row-major byte ranges, one per cell.
    pub coord_spans: Vec<Range<usize>>,
}

impl FlatTable {
    pub fn span(&self, i: usize, j: usize) -> Option<Range<usize>> {
        (i < self.rows && j < self.cols).then(|| self.coord_spans[i * self.cols + j].clone())
    }

    pub fn cell_text(&self, i: usize, j: usize) -> Option<&str> {
        self.span(i, j).map(|r| &self.text[r])
    }
}

pub fn flatten_table(grid: &TableGrid) -> FlatTable {
    let mut text = String::with_capacity(grid.caption.len() + 16 * grid.cell_count());
    text.push_str(&grid.caption);
    text.push(' ');
    text.push_str(CAP_MARK);
    let mut coord_spans = Vec::with_capacity(grid.cell_count());
    for i in 0..grid.rows {
        if i > 0 {
            text.push(' ');
            text.push_str(ROW_MARK);
        }
        for j in 0..grid.cols {
            if j > 0 {
                text.push(' ');
                text.push_str(SEP_MARK);
            }
            text.push(' ');
            let start = text.len();
            text.push_str(&grid.cell_text(i, j));
            coord_spans.push(start..text.len());
        }
    }
    FlatTable {
        text,
        rows: grid.rows,
        cols: grid.cols,
        coord_spans,
    }
}
