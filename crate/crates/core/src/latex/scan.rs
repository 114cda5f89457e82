//! Byte-offset scanning helpers shared by the document parser and the cell
//! cleaner. Every function is total: malformed input yields `None`, never a
//! panic, and offsets only ever land on char boundaries.

use std::ops::Range;

/// Removes `%` comments together with their line break and the next
/// line's leading blanks, which is how TeX reads them.
pub fn strip_comments(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    for line in src.split_inclusive('\n') {
        match comment_start(line) {
            Some(idx) => {
                out.push_str(&line[..idx]);
                // TeX also eats the newline, so the next line joins this one.
            }
            None => out.push_str(line),
        }
    }
    out
}

fn comment_start(line: &str) -> Option<usize> {
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'%' => return Some(i),
            _ => i += 1,
        }
    }
    None
}

pub fn next_char_len(s: &str, pos: usize) -> usize {
    s[pos..].chars().next().map_or(1, char::len_utf8)
}

pub fn skip_ws(s: &str, mut pos: usize) -> usize {
    let bytes = s.as_bytes();
    while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    pos
}

/// Reads a control sequence starting at `pos` (which must hold `\`).
/// Returns the name (letters plus optional `*`, or one symbol) and the
/// offset just past it.
pub fn read_command(s: &str, pos: usize) -> Option<(&str, usize)> {
    let bytes = s.as_bytes();
    if bytes.get(pos) != Some(&b'\\') {
        return None;
    }
    let start = pos + 1;
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_alphabetic() {
        end += 1;
    }
    if end == start {
        if start >= bytes.len() {
            return Some(("", start));
        }
        let len = next_char_len(s, start);
        return Some((&s[start..start + len], start + len));
    }
    if bytes.get(end) == Some(&b'*') {
        end += 1;
    }
    Some((&s[start..end], end))
}

/// Reads a balanced `{...}` group at `pos` (leading whitespace allowed).
/// Returns the inner range and the offset after the closing brace.
pub fn read_group(s: &str, pos: usize) -> Option<(Range<usize>, usize)> {
    read_delimited(s, skip_ws(s, pos), b'{', b'}')
}

/// Reads an optional `[...]` argument at `pos` (leading whitespace allowed).
pub fn read_optional(s: &str, pos: usize) -> Option<(Range<usize>, usize)> {
    read_delimited(s, skip_ws(s, pos), b'[', b']')
}

fn read_delimited(s: &str, pos: usize, open: u8, close: u8) -> Option<(Range<usize>, usize)> {
    let bytes = s.as_bytes();
    if bytes.get(pos) != Some(&open) {
        return None;
    }
    let mut depth = 0usize;
    let mut brace = 0usize;
    let mut i = pos;
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'\\' {
            i += 2;
            continue;
        }
        if open == b'[' {
            // Brackets inside braces do not close an optional argument.
            match b {
                b'{' => brace += 1,
                b'}' => brace = brace.saturating_sub(1),
                b'[' if brace == 0 => depth += 1,
                b']' if brace == 0 => {
                    depth -= 1;
                    if depth == 0 {
                        return Some((pos + 1..i, i + 1));
                    }
                }
                _ => {}
            }
        } else if b == open {
            depth += 1;
        } else if b == close {
            depth -= 1;
            if depth == 0 {
                return Some((pos + 1..i, i + 1));
            }
        }
        i += 1;
    }
    None
}

/// Finds the `\end{name}` matching an already-consumed `\begin{name}`,
/// counting nested environments of the same name. Returns the offset of
/// the `\end` and the offset after it.
pub fn find_env_end(s: &str, from: usize, name: &str) -> Option<(usize, usize)> {
    let begin = format!("\\begin{{{name}}}");
    let end = format!("\\end{{{name}}}");
    let mut depth = 1usize;
    let mut i = from;
    while i < s.len() {
        let rest = &s[i..];
        let next_begin = rest.find(&begin);
        let next_end = rest.find(&end)?;
        match next_begin {
            Some(b) if b < next_end => {
                depth += 1;
                i += b + begin.len();
            }
            _ => {
                depth -= 1;
                if depth == 0 {
                    return Some((i + next_end, i + next_end + end.len()));
                }
                i += next_end + end.len();
            }
        }
    }
    None
}

/// Splits `s` at top-level occurrences of `sep` (outside braces, not
/// escaped). Used for `&` cell separators and `\\` row breaks.
pub fn split_top_level<'a>(s: &'a str, sep: &str) -> Vec<&'a str> {
    let bytes = s.as_bytes();
    let sep_b = sep.as_bytes();
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        if depth == 0 && bytes[i..].starts_with(sep_b) {
            parts.push(&s[start..i]);
            i += sep_b.len();
            start = i;
            continue;
        }
        match bytes[i] {
            b'\\' => {
                i += 2;
                continue;
            }
            b'{' => depth += 1,
            b'}' => depth = depth.saturating_sub(1),
            _ => {}
        }
        i += 1;
    }
    parts.push(&s[start.min(s.len())..]);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_join_lines() {
        assert_eq!(strip_comments("a % note\nb\n"), "a b\n");
        assert_eq!(strip_comments("50\\% more\n"), "50\\% more\n");
        assert_eq!(strip_comments("x\n% whole\ny"), "x\ny");
    }

    #[test]
    fn groups_and_commands() {
        let s = r"\textbf{a{b}c} rest";
        let (name, after) = read_command(s, 0).unwrap();
        assert_eq!(name, "textbf");
        let (inner, after) = read_group(s, after).unwrap();
        assert_eq!(&s[inner], "a{b}c");
        assert_eq!(&s[after..], " rest");
        assert!(read_group("{unclosed", 0).is_none());
        assert_eq!(read_command(r"\section*{x}", 0).unwrap().0, "section*");
        assert_eq!(read_command(r"\%", 0).unwrap().0, "%");
        assert_eq!(read_command("\\", 0).unwrap().0, "");
    }

    #[test]
    fn optional_arg_ignores_bracket_in_braces() {
        let s = "[a{]}b] tail";
        let (inner, _) = read_optional(s, 0).unwrap();
        assert_eq!(&s[inner], "a{]}b");
    }

    #[test]
    fn env_end_nesting() {
        let s = r"x \begin{a} y \end{a} z \end{a} w";
        let (end, after) = find_env_end(s, 0, "a").unwrap();
        assert_eq!(&s[end..after], r"\end{a}");
        assert_eq!(&s[after..], " w");
        assert!(find_env_end("no end", 0, "a").is_none());
    }

    #[test]
    fn top_level_split() {
        assert_eq!(split_top_level(r"a & \& & {b & c}", "&"), vec!["a ", r" \& ", " {b & c}"]);
        assert_eq!(split_top_level(r"a \\ b", r"\\"), vec!["a ", " b"]);
    }
}
