use super::AnnotatedDocument;
use std::io::{self, BufRead, Write};

pub const ANNOTATIONS_SCHEMA: &str = "annotations.v1";

/// Writes one document per line.
pub fn write_jsonl<W: Write>(mut w: W, docs: &[AnnotatedDocument]) -> io::Result<()> {
    for d in docs {
        serde_json::to_writer(&mut w, d)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Reads documents written by [`write_jsonl`], skipping blank lines.
pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Vec<AnnotatedDocument>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: AnnotatedDocument = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", n + 1)))?;
        out.push(doc);
    }
    Ok(out)
}
