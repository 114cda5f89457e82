//! Conversion of LaTeX fragments to visible text.

use super::scan::{next_char_len, read_command, read_group, read_optional, skip_ws};
use super::{split_words, TableGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Table cells and captions: math is rendered, sub/superscripts flatten.
    Cell,
    /// Running text: inline math is kept verbatim as one word, and
    /// `\item`/`\par` become paragraph breaks.
    Body,
}

/// Commands removed together with their arguments: (name, required groups).
const DROP_WITH_ARGS: &[(&str, usize)] = &[
    ("cite", 1), ("citep", 1), ("citet", 1), ("citealp", 1), ("citealt", 1), ("citeauthor", 1),
    ("citeyear", 1), ("nocite", 1), ("ref", 1), ("eqref", 1), ("autoref", 1), ("cref", 1),
    ("Cref", 1), ("pageref", 1), ("label", 1), ("footnote", 1), ("footnotetext", 1),
    ("footnotemark", 0), ("vspace", 1), ("vspace*", 1), ("hspace", 1), ("hspace*", 1),
    ("includegraphics", 1), ("cellcolor", 1), ("rowcolor", 1), ("columncolor", 1),
    ("color", 1), ("cline", 1), ("cmidrule", 1), ("specialrule", 3), ("rule", 2),
    ("addlinespace", 0), ("bibliography", 1), ("bibliographystyle", 1), ("thanks", 1),
    ("setlength", 2), ("addtolength", 2), ("setcounter", 2), ("renewcommand", 2),
    ("newcommand", 2), ("def", 0), ("hhline", 1), ("arraybackslash", 0), ("newline", 0),
    ("input", 1), ("include", 1), ("pagestyle", 1), ("thispagestyle", 1), ("vskip", 0),
];

/// Commands whose last argument is kept: (name, leading groups to skip).
const KEEP_LAST_ARG: &[(&str, usize)] = &[
    ("textcolor", 1), ("href", 1), ("raisebox", 1), ("scalebox", 1), ("resizebox", 2),
    ("parbox", 1), ("colorbox", 1), ("fcolorbox", 2), ("multicolumn", 2), ("multirow", 2),
    ("SI", 0), ("num", 0), ("makebox", 0), ("framebox", 0),
];

const SYMBOLS: &[(&str, &str)] = &[
    ("pm", "±"), ("mp", "∓"), ("times", "×"), ("dagger", "†"), ("ddagger", "‡"), ("ast", "*"),
    ("star", "⋆"), ("cdot", "·"), ("sim", "∼"), ("approx", "≈"), ("le", "≤"), ("leq", "≤"),
    ("ge", "≥"), ("geq", "≥"), ("uparrow", "↑"), ("downarrow", "↓"), ("rightarrow", "→"),
    ("checkmark", "✓"), ("infty", "∞"), ("alpha", "α"), ("beta", "β"), ("gamma", "γ"),
    ("delta", "δ"), ("epsilon", "ε"), ("lambda", "λ"), ("mu", "μ"), ("sigma", "σ"),
    ("theta", "θ"), ("tau", "τ"), ("pi", "π"), ("degree", "°"), ("ldots", "..."),
    ("dots", "..."), ("cdots", "..."), ("LaTeX", "LaTeX"), ("TeX", "TeX"), ("textbackslash", "\\"),
    ("S", "§"), ("P", "¶"), ("copyright", "©"), ("textasciitilde", "~"), ("textendash", "–"),
    ("textemdash", "—"), ("bullet", "•"), ("circ", "∘"), ("neq", "≠"), ("ne", "≠"),
];

const TEXT_ACCENTS: &[&str] = &["'", "`", "^", "\"", "~", "=", ".", "u", "v", "H", "c", "k", "r"];

/// Strips a table cell to its visible text: formatting commands removed,
/// citations dropped, math wrappers removed with sub/superscripts flattened
/// into adjacent text, whitespace normalized.
pub fn clean_cell_text(raw: &str) -> String {
    let mut out = String::new();
    render_into(raw, Mode::Cell, false, &mut out);
    normalize_ws(&out)
}

pub(crate) fn render(raw: &str, mode: Mode) -> String {
    let mut out = String::new();
    render_into(raw, mode, false, &mut out);
    out
}

fn normalize_ws(s: &str) -> String {
    split_words(s).join(" ")
}

/// Cleans every cell and the caption, then removes rows in which every
/// cell is empty (rule/spacing artifacts), shifting merged regions.
pub fn clean_table(grid: TableGrid) -> TableGrid {
    let cleaned: Vec<Vec<Vec<String>>> = grid
        .cells
        .iter()
        .map(|row| {
            row.iter()
                .map(|cell| split_words(&clean_cell_text(&cell.join(" "))))
                .collect()
        })
        .collect();
    let keep: Vec<bool> = cleaned
        .iter()
        .map(|row| row.iter().any(|c| !c.is_empty()))
        .collect();
    let mut new_index = Vec::with_capacity(keep.len());
    let mut next = 0;
    for &k in &keep {
        new_index.push(if k { Some(next) } else { None });
        if k {
            next += 1;
        }
    }
    let mut cells: Vec<Vec<Vec<String>>> = cleaned
        .into_iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(row, _)| row)
        .collect();
    let cols = grid.cols.max(1);
    if cells.is_empty() {
        cells.push(vec![Vec::new(); cols]);
    }
    let merged_regions = grid
        .merged_regions
        .iter()
        .filter_map(|region| {
            let (r0, c0) = region.anchor;
            let kept: Vec<usize> = (r0..r0 + region.row_span)
                .filter_map(|r| new_index.get(r).copied().flatten())
                .collect();
            let first = *kept.first()?;
            Some(super::MergedRegion {
                row_span: kept.len(),
                col_span: region.col_span,
                anchor: (first, c0),
            })
        })
        .filter(|r| r.row_span > 1 || r.col_span > 1)
        .collect();
    TableGrid {
        caption: normalize_ws(&clean_cell_text(&grid.caption)),
        rows: cells.len(),
        cols,
        cells,
        merged_regions,
    }
}

fn render_into(s: &str, mode: Mode, in_math: bool, out: &mut String) {
    let bytes = s.as_bytes();
    let mut pos = 0;
    let mut math = in_math;
    while pos < bytes.len() {
        match bytes[pos] {
            b'\\' => pos = render_command(s, pos, mode, math, out),
            b'$' => {
                if mode == Mode::Body && !math {
                    pos = inline_math_verbatim(s, pos, out);
                } else {
                    // `$$` and `$` both toggle; content renders in place.
                    pos += if bytes.get(pos + 1) == Some(&b'$') { 2 } else { 1 };
                    math = !math;
                }
            }
            b'{' | b'}' => pos += 1,
            b'~' => {
                out.push(' ');
                pos += 1;
            }
            b'_' | b'^' if math => {
                pos += 1;
                pos = render_script(s, pos, mode, out);
            }
            b'&' => {
                out.push(' ');
                pos += 1;
            }
            b if math && b.is_ascii_whitespace() => pos += 1,
            _ => {
                let len = next_char_len(s, pos);
                out.push_str(&s[pos..pos + len]);
                pos += len;
            }
        }
    }
}

/// Sub/superscript argument: a group or a single character, rendered
/// directly adjacent to the preceding text.
fn render_script(s: &str, pos: usize, mode: Mode, out: &mut String) -> usize {
    let pos = skip_ws(s, pos);
    if pos >= s.len() {
        return pos;
    }
    if let Some((inner, after)) = read_group(s, pos) {
        render_into(&s[inner], mode, true, out);
        return after;
    }
    if s.as_bytes()[pos] == b'\\' {
        return render_command(s, pos, mode, true, out);
    }
    let len = next_char_len(s, pos);
    out.push_str(&s[pos..pos + len]);
    pos + len
}

fn inline_math_verbatim(s: &str, pos: usize, out: &mut String) -> usize {
    let bytes = s.as_bytes();
    let mut i = pos + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'$' => {
                push_verbatim(&s[pos..=i], out);
                return i + 1;
            }
            _ => i += 1,
        }
    }
    // Unterminated: keep the rest verbatim.
    push_verbatim(&s[pos..], out);
    s.len()
}

fn push_verbatim(span: &str, out: &mut String) {
    out.extend(span.chars().filter(|c| !c.is_whitespace()));
}

fn render_command(s: &str, pos: usize, mode: Mode, math: bool, out: &mut String) -> usize {
    let Some((name, mut after)) = read_command(s, pos) else {
        return pos + 1;
    };
    match name {
        "" => return after,
        "%" | "&" | "_" | "#" | "$" | "{" | "}" => {
            out.push_str(name);
            return after;
        }
        "\\" => {
            // `\\[2pt]` carries an optional spacing argument.
            if let Some((_, a)) = read_optional(s, after) {
                after = a;
            }
            out.push(' ');
            return after;
        }
        " " => {
            out.push(' ');
            return after;
        }
        "," | ";" | ":" | "!" | ">" | "/" | "-" => return after,
        "(" | ")" if mode == Mode::Body => {
            // \( ... \) inline math
            if name == "(" {
                let end = s[after..].find("\\)").map_or(s.len(), |e| after + e + 2);
                push_verbatim(&s[pos..end.min(s.len())], out);
                return end.min(s.len());
            }
            return after;
        }
        "(" | ")" | "[" | "]" => return after,
        "item" | "par" if mode == Mode::Body => {
            if let Some((_, a)) = read_optional(s, after) {
                after = a;
            }
            out.push_str("\n\n");
            return after;
        }
        "paragraph" | "paragraph*" | "subparagraph" if mode == Mode::Body => {
            if let Some((_, a)) = read_optional(s, after) {
                after = a;
            }
            out.push_str("\n\n");
            if let Some((inner, a)) = read_group(s, after) {
                render_into(&s[inner], Mode::Cell, false, out);
                out.push_str("\n\n");
                return a;
            }
            return after;
        }
        _ => {}
    }
    if TEXT_ACCENTS.contains(&name) && !(math && name == "^") {
        // Accent on the following group or character: keep the letter.
        let p = skip_ws(s, after);
        if let Some((inner, a)) = read_group(s, p) {
            render_into(&s[inner], mode, math, out);
            return a;
        }
        if p < s.len() && s.as_bytes()[p] != b'\\' {
            let len = next_char_len(s, p);
            out.push_str(&s[p..p + len]);
            return p + len;
        }
        return after;
    }
    if let Some(&(_, groups)) = DROP_WITH_ARGS.iter().find(|(n, _)| *n == name) {
        return skip_args(s, after, groups);
    }
    if let Some(&(_, skip)) = KEEP_LAST_ARG.iter().find(|(n, _)| *n == name) {
        let mut p = skip_args(s, after, skip);
        if name == "multirow" {
            // \multirow{n}[bigstruts]{width}[fixup]{text}
            if let Some((_, a)) = read_optional(s, p) {
                p = a;
            }
        }
        if let Some((inner, a)) = read_group(s, p) {
            render_into(&s[inner], mode, math, out);
            if name == "SI" {
                if let Some((unit, a2)) = read_group(s, a) {
                    out.push(' ');
                    render_into(&s[unit], mode, math, out);
                    return a2;
                }
            }
            return a;
        }
        return p;
    }
    if let Some(&(_, sym)) = SYMBOLS.iter().find(|(n, _)| *n == name) {
        out.push_str(sym);
        return after;
    }
    // Any other command: if it takes a braced argument right away, keep
    // the argument's text (formatting macros, unknown user macros).
    let bytes = s.as_bytes();
    let mut p = after;
    if let Some((_, a)) = read_optional(s, p).filter(|_| bytes.get(p) == Some(&b'[')) {
        p = a;
    }
    if bytes.get(p) == Some(&b'{') {
        if let Some((inner, a)) = read_group(s, p) {
            render_into(&s[inner], mode, math, out);
            return a;
        }
    }
    after
}

fn skip_args(s: &str, mut pos: usize, groups: usize) -> usize {
    // Optional arguments and booktabs trims like `(lr)` may precede groups.
    loop {
        let p = skip_ws(s, pos);
        if let Some((_, a)) = read_optional(s, p).filter(|_| s.as_bytes().get(p) == Some(&b'[')) {
            pos = a;
            continue;
        }
        if s.as_bytes().get(p) == Some(&b'(') {
            if let Some(end) = s[p..].find(')') {
                pos = p + end + 1;
                continue;
            }
        }
        break;
    }
    for _ in 0..groups {
        match read_group(s, pos) {
            Some((_, a)) => pos = a,
            None => break,
        }
    }
    pos
}
