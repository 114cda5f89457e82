use super::clean::{clean_table, render, Mode};
use super::scan::{
    find_env_end, read_command, read_group, read_optional, skip_ws, split_top_level,
    strip_comments,
};
use super::{
    split_sentences, split_words, Diagnostic, DomainTag, MergedRegion, ParsedDocument, Section,
    SourceArchive, TableGrid,
};
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::LazyLock;

/// Maximum nesting of `\input` / `\include`.
pub const MAX_INPUT_DEPTH: usize = 8;

/// Environments skipped entirely (math displays, figures, code, references).
const DROPPED_ENVS: &[&str] = &[
    "figure", "figure*", "equation", "equation*", "align", "align*", "gather", "gather*",
    "multline", "multline*", "eqnarray", "eqnarray*", "displaymath", "math", "flalign",
    "flalign*", "alignat", "alignat*", "algorithm", "algorithm*", "algorithmic", "lstlisting",
    "verbatim", "verbatim*", "minted", "thebibliography", "tikzpicture", "picture", "comment",
    "wrapfigure", "subfigure", "SCfigure", "titlepage",
];
const TABLE_FLOATS: &[&str] = &["table", "table*", "sidewaystable", "sidewaystable*", "wraptable"];
const TABULARS: &[&str] = &["tabular", "tabular*", "tabularx", "tabulary", "longtable", "longtable*", "array"];

static BLANK_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\n[ \t\r]*\n").expect("valid blank-line regex"));
static ROW_SPACING: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\s*\[\s*-?[0-9.]+\s*(pt|em|ex|mm|cm|in|bp)\s*\]").expect("valid spacing regex")
});
static INPUT_CMD: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\\(?:input|include|subfile)(?:\s*\{([^}]*)\}|\s+([A-Za-z0-9_./\-]+))")
        .expect("valid input regex")
});

/// Result of parsing: the (possibly partial) document plus any problems
/// encountered. Parsing never fails once the root file is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseOutput {
    pub document: ParsedDocument,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutput {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

pub fn parse_document(archive: &SourceArchive) -> ParseOutput {
    parse_document_with_domain(archive, DomainTag::Other)
}

pub fn parse_document_with_domain(archive: &SourceArchive, domain: DomainTag) -> ParseOutput {
    let mut diags = Vec::new();
    let source = load_expanded(archive, &archive.main_tex, 0, &mut diags);
    let body = extract_body(&source, &archive.main_tex, &mut diags);
    let mut walker = Walker {
        file: archive.main_tex.clone(),
        doc: ParsedDocument::new(&archive.arxiv_id, domain),
        current: Section {
            title: String::new(),
            depth: 1,
            paragraphs: Vec::new(),
        },
        diags,
    };
    walker.walk(body, 0);
    walker.finish()
}

fn decode(archive: &SourceArchive, name: &str, diags: &mut Vec<Diagnostic>) -> Option<String> {
    let bytes = archive.files.get(name)?;
    Some(match std::str::from_utf8(bytes) {
        Ok(s) => s.to_string(),
        Err(_) => {
            diags.push(Diagnostic {
                file: name.to_string(),
                offset: 0,
                message: "file is not valid UTF-8; decoded lossily".to_string(),
            });
            String::from_utf8_lossy(bytes).into_owned()
        }
    })
}

fn resolve_input(archive: &SourceArchive, from: &str, target: &str) -> Option<String> {
    let target = target.trim();
    let base = Path::new(from).parent().unwrap_or(Path::new(""));
    let mut candidates = Vec::new();
    for root in [base, Path::new("")] {
        let p = root.join(target);
        candidates.push(p.to_string_lossy().to_string());
        candidates.push(format!("{}.tex", p.to_string_lossy()));
    }
    candidates
        .into_iter()
        .map(|c| c.trim_start_matches("./").to_string())
        .find(|c| archive.files.contains_key(c))
}

fn load_expanded(
    archive: &SourceArchive,
    name: &str,
    depth: usize,
    diags: &mut Vec<Diagnostic>,
) -> String {
    let Some(raw) = decode(archive, name, diags) else {
        return String::new();
    };
    let text = strip_comments(&raw);
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for cap in INPUT_CMD.captures_iter(&text) {
        let m = cap.get(0).expect("whole match");
        out.push_str(&text[last..m.start()]);
        last = m.end();
        let target = cap.get(1).or_else(|| cap.get(2)).map_or("", |t| t.as_str());
        if depth >= MAX_INPUT_DEPTH {
            diags.push(Diagnostic {
                file: name.to_string(),
                offset: m.start(),
                message: format!("\\input nesting deeper than {MAX_INPUT_DEPTH}; `{target}` skipped"),
            });
            continue;
        }
        match resolve_input(archive, name, target) {
            Some(path) => {
                out.push('\n');
                out.push_str(&load_expanded(archive, &path, depth + 1, diags));
                out.push('\n');
            }
            None => diags.push(Diagnostic {
                file: name.to_string(),
                offset: m.start(),
                message: format!("input file `{target}` not found"),
            }),
        }
    }
    out.push_str(&text[last..]);
    out
}

fn extract_body<'a>(source: &'a str, file: &str, diags: &mut Vec<Diagnostic>) -> &'a str {
    const BEGIN: &str = "\\begin{document}";
    const END: &str = "\\end{document}";
    match source.find(BEGIN) {
        Some(b) => {
            let start = b + BEGIN.len();
            match source[start..].find(END) {
                Some(e) => &source[start..start + e],
                None => {
                    diags.push(Diagnostic {
                        file: file.to_string(),
                        offset: start,
                        message: "missing \\end{document}".to_string(),
                    });
                    &source[start..]
                }
            }
        }
        None => {
            if source.contains("\\documentclass") {
                diags.push(Diagnostic {
                    file: file.to_string(),
                    offset: 0,
                    message: "no \\begin{document}; parsing whole file".to_string(),
                });
            }
            source
        }
    }
}

struct Walker {
    file: String,
    doc: ParsedDocument,
    current: Section,
    diags: Vec<Diagnostic>,
}

impl Walker {
    fn diag(&mut self, offset: usize, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            file: self.file.clone(),
            offset,
            message: message.into(),
        });
    }

    fn finish(mut self) -> ParseOutput {
        self.close_section();
        ParseOutput {
            document: self.doc,
            diagnostics: self.diags,
        }
    }

    fn close_section(&mut self) {
        let section = std::mem::replace(
            &mut self.current,
            Section {
                title: String::new(),
                depth: 1,
                paragraphs: Vec::new(),
            },
        );
        // An untitled lead-in section only exists if it has text.
        if !section.title.is_empty() || !section.paragraphs.is_empty() {
            self.doc.sections.push(section);
        }
    }

    fn open_section(&mut self, title: String, depth: u8) {
        self.close_section();
        self.current.title = title;
        self.current.depth = depth;
    }

    fn flush_text(&mut self, chunk: &str) {
        if chunk.trim().is_empty() {
            return;
        }
        let rendered = render(chunk, Mode::Body);
        for para in BLANK_LINE.split(&rendered) {
            let words = split_words(para);
            if words.is_empty() {
                continue;
            }
            self.current.paragraphs.push(split_sentences(words));
        }
    }

    /// Walks `body`, whose first byte sits at `base` in the expanded source
    /// (used for diagnostic offsets only).
    fn walk(&mut self, body: &str, base: usize) {
        let bytes = body.as_bytes();
        let mut pos = 0;
        let mut text_start = 0;
        while pos < bytes.len() {
            match bytes[pos] {
                b'\\' => {
                    let Some((name, after)) = read_command(body, pos) else {
                        pos += 1;
                        continue;
                    };
                    match name {
                        "section" | "section*" | "chapter" | "chapter*" | "subsection"
                        | "subsection*" | "subsubsection" | "subsubsection*" => {
                            self.flush_text(&body[text_start..pos]);
                            let depth = if name.starts_with("sub") { 2 } else { 1 };
                            let mut p = after;
                            if let Some((_, a)) = read_optional(body, p) {
                                p = a;
                            }
                            let title = match read_group(body, p) {
                                Some((inner, a)) => {
                                    p = a;
                                    split_words(&render(&body[inner], Mode::Cell)).join(" ")
                                }
                                None => {
                                    self.diag(base + pos, format!("\\{name} without a title group"));
                                    String::new()
                                }
                            };
                            self.open_section(title, depth);
                            pos = p;
                            text_start = pos;
                        }
                        "begin" => {
                            self.flush_text(&body[text_start..pos]);
                            pos = self.environment(body, pos, after, base);
                            text_start = pos;
                        }
                        "end" => {
                            // Closing marker of a pass-through environment.
                            self.flush_text(&body[text_start..pos]);
                            pos = read_group(body, after).map_or(after, |(_, a)| a);
                            text_start = pos;
                        }
                        "[" => {
                            self.flush_text(&body[text_start..pos]);
                            pos = match body[after..].find("\\]") {
                                Some(e) => after + e + 2,
                                None => {
                                    self.diag(base + pos, "unterminated \\[ display math");
                                    body.len()
                                }
                            };
                            text_start = pos;
                        }
                        _ => pos = after,
                    }
                }
                b'$' if bytes.get(pos + 1) == Some(&b'$') => {
                    self.flush_text(&body[text_start..pos]);
                    pos = match body[pos + 2..].find("$$") {
                        Some(e) => pos + 2 + e + 2,
                        None => {
                            self.diag(base + pos, "unterminated $$ display math");
                            body.len()
                        }
                    };
                    text_start = pos;
                }
                b'$' => {
                    // Skip inline math so its contents are not read as structure.
                    let mut i = pos + 1;
                    while i < bytes.len() && bytes[i] != b'$' {
                        i += if bytes[i] == b'\\' { 2 } else { 1 };
                    }
                    pos = (i + 1).min(bytes.len());
                }
                _ => pos += 1,
            }
        }
        self.flush_text(&body[text_start.min(body.len())..]);
    }

    /// Handles `\begin{...}` at `pos`; returns where scanning resumes.
    fn environment(&mut self, body: &str, pos: usize, after: usize, base: usize) -> usize {
        let Some((name_range, after_name)) = read_group(body, after) else {
            self.diag(base + pos, "\\begin without an environment name");
            return after;
        };
        let name = body[name_range].trim().to_string();
        let is_float = TABLE_FLOATS.contains(&name.as_str());
        let is_tabular = TABULARS.contains(&name.as_str());
        let is_dropped = DROPPED_ENVS.contains(&name.as_str());
        if !(is_float || is_tabular || is_dropped || name == "abstract") {
            // Pass-through environment: content is read as ordinary text.
            return skip_env_args(body, after_name, &name);
        }
        let Some((end_start, end_after)) = find_env_end(body, after_name, &name) else {
            self.diag(base + pos, format!("unbalanced environment `{name}`"));
            return after_name;
        };
        let content = &body[after_name..end_start];
        if is_float {
            self.float_tables(content, base + after_name);
        } else if is_tabular {
            let caption = find_caption(content).unwrap_or_default();
            match parse_tabular(content, &name) {
                Some(grid) => self.push_table(grid, caption),
                None => self.diag(base + pos, format!("could not read `{name}` body")),
            }
        } else if name == "abstract" {
            self.open_section("Abstract".to_string(), 1);
            self.walk(content, base + after_name);
            self.open_section(String::new(), 1);
        }
        end_after
    }

    fn push_table(&mut self, grid: TableGrid, caption: String) {
        let mut grid = grid;
        grid.caption = caption;
        self.doc.tables.push(clean_table(grid));
    }

    fn float_tables(&mut self, content: &str, base: usize) {
        let caption = find_caption(content).unwrap_or_default();
        let mut found = false;
        let mut pos = 0;
        while let Some(rel) = content[pos..].find("\\begin") {
            let at = pos + rel;
            let Some((_, after)) = read_command(content, at) else { break };
            let Some((name_range, after_name)) = read_group(content, after) else {
                pos = after;
                continue;
            };
            let name = content[name_range].trim().to_string();
            if !TABULARS.contains(&name.as_str()) {
                pos = after_name;
                continue;
            }
            let Some((end_start, end_after)) = find_env_end(content, after_name, &name) else {
                self.diag(base + at, format!("unbalanced environment `{name}`"));
                break;
            };
            match parse_tabular(&content[after_name..end_start], &name) {
                Some(grid) => {
                    self.push_table(grid, caption.clone());
                    found = true;
                }
                None => self.diag(base + at, format!("could not read `{name}` body")),
            }
            pos = end_after;
        }
        if !found {
            self.diag(base, "table float without a tabular body");
        }
    }
}

fn skip_env_args(body: &str, mut pos: usize, name: &str) -> usize {
    let groups = match name {
        "minipage" | "multicols" | "multicols*" | "adjustbox" | "subtable" => 1,
        _ => 0,
    };
    if let Some((_, a)) = read_optional(body, pos).filter(|_| body.as_bytes().get(skip_ws(body, pos)) == Some(&b'[')) {
        pos = a;
    }
    for _ in 0..groups {
        if let Some((_, a)) = read_group(body, pos) {
            pos = a;
        }
    }
    pos
}

fn find_caption(content: &str) -> Option<String> {
    let mut pos = 0;
    while let Some(rel) = content[pos..].find("\\caption") {
        let at = pos + rel;
        let (name, mut after) = read_command(content, at)?;
        if name != "caption" && name != "caption*" {
            pos = after;
            continue;
        }
        if let Some((_, a)) = read_optional(content, after).filter(|_| content.as_bytes().get(skip_ws(content, after)) == Some(&b'[')) {
            after = a;
        }
        let (inner, _) = read_group(content, after)?;
        return Some(split_words(&render(&content[inner], Mode::Cell)).join(" "));
    }
    None
}

/// Removes every `\caption{...}` so that captions inside `longtable`
/// bodies are not read as rows.
fn strip_captions(content: &str) -> String {
    let mut out = String::with_capacity(content.len());
    let mut pos = 0;
    while let Some(rel) = content[pos..].find("\\caption") {
        let at = pos + rel;
        out.push_str(&content[pos..at]);
        let (_, mut after) = read_command(content, at).unwrap_or(("", at + 1));
        if let Some((_, a)) = read_optional(content, after).filter(|_| content.as_bytes().get(skip_ws(content, after)) == Some(&b'[')) {
            after = a;
        }
        pos = read_group(content, after).map_or(after, |(_, a)| a);
    }
    out.push_str(&content[pos..]);
    out
}

/// Replaces nested tabulars (multi-line cells) by their flattened content
/// so their row breaks do not split the outer table.
fn inline_nested_tabulars(body: &str) -> String {
    let mut text = body.to_string();
    for _ in 0..32 {
        let Some(at) = TABULARS
            .iter()
            .filter_map(|t| text.find(&format!("\\begin{{{t}}}")).map(|p| (p, *t)))
            .min()
        else {
            break;
        };
        let (start, name) = at;
        let after_begin = start + format!("\\begin{{{name}}}").len();
        let Some(args_end) = skip_tabular_args(&text, after_begin, name) else { break };
        let Some((end_start, end_after)) = find_env_end(&text, args_end, name) else { break };
        let inner = text[args_end..end_start].replace("\\\\", " ").replace('&', " ");
        text.replace_range(start..end_after, &format!("{{{inner}}}"));
    }
    text
}

fn skip_tabular_args(s: &str, mut pos: usize, name: &str) -> Option<usize> {
    let opt = |s: &str, p: usize| {
        read_optional(s, p).filter(|_| s.as_bytes().get(skip_ws(s, p)) == Some(&b'['))
    };
    if let Some((_, a)) = opt(s, pos) {
        pos = a;
    }
    if matches!(name, "tabular*" | "tabularx" | "tabulary") {
        pos = read_group(s, pos)?.1;
    }
    pos = read_group(s, pos)?.1;
    Some(pos)
}

const RULE_COMMANDS: &[&str] = &[
    "hline", "toprule", "midrule", "bottomrule", "cline", "cmidrule", "addlinespace",
    "specialrule", "hhline", "morecmidrules", "endhead", "endfirsthead", "endfoot",
    "endlastfoot", "noalign", "rowcolor", "centering", "small", "footnotesize", "scriptsize",
    "tiny", "hdashline", "cdashline", "Xhline", "arrayrulecolor",
];

fn strip_rules(row: &str) -> String {
    let mut out = String::with_capacity(row.len());
    let mut pos = 0;
    let bytes = row.as_bytes();
    while pos < bytes.len() {
        if bytes[pos] == b'\\' {
            if let Some((name, after)) = read_command(row, pos) {
                if RULE_COMMANDS.contains(&name) {
                    let groups = match name {
                        "cline" | "cmidrule" | "hhline" | "noalign" | "rowcolor" | "cdashline"
                        | "arrayrulecolor" | "Xhline" => 1,
                        "specialrule" => 3,
                        _ => 0,
                    };
                    let mut p = after;
                    loop {
                        let q = skip_ws(row, p);
                        if bytes.get(q) == Some(&b'[') {
                            if let Some((_, a)) = read_optional(row, q) {
                                p = a;
                                continue;
                            }
                        }
                        if bytes.get(q) == Some(&b'(') && matches!(name, "cmidrule") {
                            if let Some(e) = row[q..].find(')') {
                                p = q + e + 1;
                                continue;
                            }
                        }
                        break;
                    }
                    for _ in 0..groups {
                        if let Some((_, a)) = read_group(row, p) {
                            p = a;
                        }
                    }
                    out.push(' ');
                    pos = p;
                    continue;
                }
                out.push_str(&row[pos..after]);
                pos = after;
                continue;
            }
        }
        let len = super::scan::next_char_len(row, pos);
        out.push_str(&row[pos..pos + len]);
        pos += len;
    }
    out
}

#[derive(Debug)]
struct RawCell {
    text: String,
    col_span: usize,
    /// Signed: negative spans grow upward from the anchor row.
    row_span: i64,
}

fn parse_cell(raw: &str) -> RawCell {
    let trimmed = raw.trim();
    let mut cell = RawCell {
        text: trimmed.to_string(),
        col_span: 1,
        row_span: 1,
    };
    let mut text = trimmed.to_string();
    if let Some((n, content)) = multi_command(&text, "multicolumn") {
        cell.col_span = n.unsigned_abs().max(1) as usize;
        text = content;
    }
    if let Some((n, content)) = multi_command(&text, "multirow") {
        cell.row_span = if n == 0 { 1 } else { n };
        text = content;
    }
    cell.text = text;
    cell
}

/// Parses `\multicolumn{n}{spec}{content}` or
/// `\multirow{n}[opt]{width}[opt]{content}` at the start of `text`
/// (only a leading cell-wide wrapper counts).
fn multi_command(text: &str, cmd: &str) -> Option<(i64, String)> {
    let start = text.find(&format!("\\{cmd}"))?;
    if !text[..start].trim().is_empty() && !text[..start].trim().starts_with('\\') {
        return None;
    }
    let (name, after) = read_command(text, start)?;
    if name != cmd {
        return None;
    }
    let (n_range, mut p) = read_group(text, after)?;
    let n: i64 = text[n_range].trim().parse().ok()?;
    if cmd == "multirow" {
        if let Some((_, a)) = read_optional(text, p).filter(|_| text.as_bytes().get(skip_ws(text, p)) == Some(&b'[')) {
            p = a;
        }
    }
    p = read_group(text, p)?.1;
    if cmd == "multirow" {
        if let Some((_, a)) = read_optional(text, p).filter(|_| text.as_bytes().get(skip_ws(text, p)) == Some(&b'[')) {
            p = a;
        }
    }
    let (content, end) = read_group(text, p)?;
    let prefix = &text[..start];
    let suffix = &text[end..];
    Some((n, format!("{prefix}{}{suffix}", &text[content])))
}

/// Parses the body of a tabular-like environment (starting right after
/// `\begin{name}`) into a rectangular grid of raw cell words, with merged
/// cells value-replicated.
fn parse_tabular(env: &str, name: &str) -> Option<TableGrid> {
    let body_start = skip_tabular_args(env, 0, name)?;
    let body = inline_nested_tabulars(&strip_captions(&env[body_start..]));
    let body = body.replace("\\tabularnewline", "\\\\");
    let mut rows: Vec<Vec<RawCell>> = Vec::new();
    for raw_row in split_top_level(&body, "\\\\") {
        let row = ROW_SPACING.replace(raw_row, "");
        let row = strip_rules(&row);
        let cells: Vec<RawCell> = split_top_level(&row, "&").into_iter().map(parse_cell).collect();
        if cells.len() == 1 && cells[0].text.is_empty() {
            continue;
        }
        rows.push(cells);
    }
    if rows.is_empty() {
        return None;
    }

    let width = rows
        .iter()
        .map(|r| r.iter().map(|c| c.col_span).sum::<usize>())
        .max()
        .unwrap_or(1)
        .max(1);
    let height = rows.len();
    let mut grid: Vec<Vec<Option<String>>> = vec![vec![None; width]; height];
    let mut regions = Vec::new();
    let mut multirows = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        let mut c = 0;
        for cell in row {
            let span = cell.col_span.min(width - c.min(width));
            for k in 0..span {
                grid[r][c + k] = Some(cell.text.clone());
            }
            if cell.row_span != 1 {
                multirows.push((r, c, span, cell.row_span, cell.text.clone()));
            } else if span > 1 {
                regions.push(MergedRegion { row_span: 1, col_span: span, anchor: (r, c) });
            }
            c += span;
        }
    }
    for (r, c, span, row_span, text) in multirows {
        let n = row_span.unsigned_abs() as usize;
        let (top, bottom) = if row_span > 0 {
            (r, (r + n).min(height))
        } else {
            (r.saturating_sub(n - 1), r + 1)
        };
        for row in &mut grid[top..bottom] {
            for slot in &mut row[c..c + span] {
                if slot.as_deref().is_none_or(|t| t.trim().is_empty()) {
                    *slot = Some(text.clone());
                }
            }
        }
        regions.push(MergedRegion { row_span: bottom - top, col_span: span, anchor: (top, c) });
    }
    regions.sort_by_key(|r| r.anchor);
    let cells = grid
        .into_iter()
        .map(|row| row.into_iter().map(|c| split_words(&c.unwrap_or_default())).collect())
        .collect();
    Some(TableGrid {
        caption: String::new(),
        rows: height,
        cols: width,
        cells,
        merged_regions: regions,
    })
}
