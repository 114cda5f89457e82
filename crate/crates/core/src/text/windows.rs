use crate::latex::ParsedDocument;
use serde::{Deserialize, Serialize};
use std::ops::Range;

pub const DEFAULT_WORD_BUDGET: usize = 512;

/// A center sentence plus the neighbors that fit in the word budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextWindow {
    pub doc_id: String,
    pub center: usize,
    /// Contiguous global sentence indices.
    pub sentences: Range<usize>,
    pub word_budget: usize,
    /// Set when the center sentence alone exceeds the budget.
    pub over_budget: bool,
}

impl ContextWindow {
    pub fn sentence_refs(&self) -> Vec<usize> {
        self.sentences.clone().collect()
    }

    /// Position of the center inside the window.
    pub fn center_offset(&self) -> usize {
        self.center - self.sentences.start
    }
}

/// One window per sentence. Starting from the center, neighbors are added
/// alternately on the left and right; a side stops at the first sentence
/// that would exceed the budget or at the document boundary.
pub fn build_windows(doc: &ParsedDocument, budget: usize) -> Vec<ContextWindow> {
    let lens: Vec<usize> = doc.sentences().iter().map(|s| s.len()).collect();
    (0..lens.len())
        .map(|center| {
            let mut total = lens[center];
            let over_budget = total > budget;
            let (mut lo, mut hi) = (center, center + 1);
            if over_budget {
                log::warn!(
                    "{}: sentence {center} has {total} words, over the {budget}-word budget",
                    doc.doc_id
                );
            } else {
                let (mut left_open, mut right_open) = (true, true);
                while left_open || right_open {
                    if left_open {
                        if lo > 0 && total + lens[lo - 1] <= budget {
                            lo -= 1;
                            total += lens[lo];
                        } else {
                            left_open = false;
                        }
                    }
                    if right_open {
                        if hi < lens.len() && total + lens[hi] <= budget {
                            total += lens[hi];
                            hi += 1;
                        } else {
                            right_open = false;
                        }
                    }
                }
            }
            ContextWindow {
                doc_id: doc.doc_id.clone(),
                center,
                sentences: lo..hi,
                word_budget: budget,
                over_budget,
            }
        })
        .collect()
}
