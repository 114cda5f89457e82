use super::LatexError;
use flate2::read::GzDecoder;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Read;
use std::sync::LazyLock;

static NEW_ID: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\d{4}\.\d{4,5}(v\d+)?$").expect("valid id regex"));
static LEGACY_ID: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^[a-z][a-z\-]*(\.[A-Z]{2})?/\d{7}(v\d+)?$").expect("valid legacy id regex")
});

pub fn is_valid_arxiv_id(id: &str) -> bool {
    NEW_ID.is_match(id) || LEGACY_ID.is_match(id)
}

/// Raw files of one paper's LaTeX source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceArchive {
    pub arxiv_id: String,
    pub files: BTreeMap<String, Vec<u8>>,
    pub main_tex: String,
}

impl SourceArchive {
    /// Builds an archive, detecting the root file: the `.tex` file that
    /// contains `\documentclass`, ties broken by size.
    pub fn new(arxiv_id: &str, files: BTreeMap<String, Vec<u8>>) -> Result<Self, LatexError> {
        if !is_valid_arxiv_id(arxiv_id) {
            return Err(LatexError::InvalidId(arxiv_id.to_string()));
        }
        let main_tex = detect_main_tex(&files).ok_or(LatexError::NoMainTex)?;
        Ok(SourceArchive {
            arxiv_id: arxiv_id.to_string(),
            files,
            main_tex,
        })
    }

    /// Convenience for single-file sources.
    pub fn from_tex(arxiv_id: &str, source: &str) -> Result<Self, LatexError> {
        let mut files = BTreeMap::new();
        files.insert("main.tex".to_string(), source.as_bytes().to_vec());
        Self::new(arxiv_id, files)
    }

    /// Decodes an arXiv e-print payload. arXiv serves gzipped tarballs for
    /// multi-file sources, a gzipped single `.tex` otherwise; uncompressed
    /// variants are accepted too.
    pub fn from_payload(arxiv_id: &str, payload: &[u8]) -> Result<Self, LatexError> {
        let raw = if payload.starts_with(&[0x1f, 0x8b]) {
            let mut out = Vec::new();
            GzDecoder::new(payload)
                .read_to_end(&mut out)
                .map_err(|e| LatexError::Archive(e.to_string()))?;
            out
        } else {
            payload.to_vec()
        };
        if raw.starts_with(b"%PDF") {
            return Err(LatexError::NoSource(arxiv_id.to_string()));
        }
        let files = match read_tar(&raw) {
            Some(files) if !files.is_empty() => files,
            _ => {
                let mut files = BTreeMap::new();
                files.insert("main.tex".to_string(), raw);
                files
            }
        };
        if !files.keys().any(|k| k.ends_with(".tex")) {
            return Err(LatexError::NoSource(arxiv_id.to_string()));
        }
        Self::new(arxiv_id, files)
    }

    pub fn main_source(&self) -> &[u8] {
        &self.files[&self.main_tex]
    }
}

fn read_tar(raw: &[u8]) -> Option<BTreeMap<String, Vec<u8>>> {
    // A tar header carries "ustar" at offset 257.
    if raw.len() < 512 || &raw[257..262] != b"ustar" {
        return None;
    }
    let mut archive = tar::Archive::new(raw);
    let mut files = BTreeMap::new();
    for entry in archive.entries().ok()? {
        let mut entry = entry.ok()?;
        if !entry.header().entry_type().is_file() {
            continue;
        }
        let path = entry.path().ok()?.to_string_lossy().trim_start_matches("./").to_string();
        let mut data = Vec::new();
        entry.read_to_end(&mut data).ok()?;
        files.insert(path, data);
    }
    Some(files)
}

fn detect_main_tex(files: &BTreeMap<String, Vec<u8>>) -> Option<String> {
    let tex = files.iter().filter(|(k, _)| k.ends_with(".tex"));
    let with_class = tex
        .clone()
        .filter(|(_, v)| contains(v, b"\\documentclass"))
        .max_by_key(|(k, v)| (v.len(), std::cmp::Reverse((*k).clone())));
    with_class
        .or_else(|| tex.max_by_key(|(k, v)| (v.len(), std::cmp::Reverse((*k).clone()))))
        .map(|(k, _)| k.clone())
}

fn contains(haystack: &[u8], needle: &[u8]) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle)
}
