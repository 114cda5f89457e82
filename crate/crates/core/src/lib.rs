//! Semi-supervised, cross-modality scientific information extraction.
//!
//! Papers are ingested from their LaTeX sources ([`latex`]), annotated with
//! typed entity spans in text and tables plus untyped table relations
//! ([`docmodel`]), auto-labelled by pluggable extractors ([`text`],
//! [`table`], [`llm`]), corrected by human reviewers and fed back into the
//! next training round ([`pipeline`]), and scored with strict-match
//! precision/recall/F1 ([`eval`]).

pub mod backend;
pub mod docmodel;
pub mod eval;
pub mod latex;
pub mod llm;
pub mod pipeline;
pub mod synth;
pub mod table;
pub mod text;
