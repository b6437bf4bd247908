//! Lexical scanners. Each returns the end offset of the lexeme at `pos`.

fn is_alnum(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Skips whitespace, `%` line comments and `/* */` block comments.
pub fn skip_ws(src: &str, mut pos: usize) -> usize {
    let b = src.as_bytes();
    loop {
        while pos < b.len() && b[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < b.len() && b[pos] == b'%' {
            while pos < b.len() && b[pos] != b'\n' {
                pos += 1;
            }
        } else if b[pos..].starts_with(b"/*") {
            pos = match src[pos + 2..].find("*/") {
                Some(i) => pos + 2 + i + 2,
                None => b.len(),
            };
        } else {
            return pos;
        }
    }
}

fn word(src: &str, pos: usize, first: fn(u8) -> bool) -> Option<usize> {
    let b = src.as_bytes();
    if pos < b.len() && first(b[pos]) {
        let mut end = pos + 1;
        while end < b.len() && is_alnum(b[end]) {
            end += 1;
        }
        Some(end)
    } else {
        None
    }
}

pub fn lower_word(src: &str, pos: usize) -> Option<usize> {
    word(src, pos, |c| c.is_ascii_lowercase())
}

pub fn upper_word(src: &str, pos: usize) -> Option<usize> {
    word(src, pos, |c| c.is_ascii_uppercase())
}

/// `$word` or `$$word`.
pub fn dollar_word(src: &str, pos: usize) -> Option<usize> {
    let b = src.as_bytes();
    let mut p = pos;
    while p < b.len() && b[p] == b'$' && p - pos < 2 {
        p += 1;
    }
    if p == pos {
        return None;
    }
    lower_word(src, p)
}

fn quoted(src: &str, pos: usize, q: u8) -> Option<usize> {
    let b = src.as_bytes();
    if pos >= b.len() || b[pos] != q {
        return None;
    }
    let mut p = pos + 1;
    while p < b.len() {
        match b[p] {
            b'\\' => p += 2,
            c if c == q => return if p == pos + 1 { None } else { Some(p + 1) },
            b'\n' => return None,
            _ => p += 1,
        }
    }
    None
}

pub fn single_quoted(src: &str, pos: usize) -> Option<usize> {
    quoted(src, pos, b'\'')
}

pub fn distinct_object(src: &str, pos: usize) -> Option<usize> {
    quoted(src, pos, b'"')
}

/// Strips the surrounding quotes and resolves `\\` escapes.
pub fn unquote(raw: &str) -> String {
    let inner = &raw[1..raw.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(n) = chars.next() {
                out.push(n);
            }
        } else {
            out.push(c);
        }
    }
    out
}

pub fn integer(src: &str, pos: usize) -> Option<usize> {
    let b = src.as_bytes();
    let mut end = pos;
    while end < b.len() && b[end].is_ascii_digit() {
        end += 1;
    }
    (end > pos).then_some(end)
}

/// Signed integer, decimal or exponent form.
pub fn number(src: &str, pos: usize) -> Option<usize> {
    let b = src.as_bytes();
    let mut p = pos;
    if p < b.len() && (b[p] == b'-' || b[p] == b'+') {
        p += 1;
    }
    let mut end = integer(src, p)?;
    if end + 1 < b.len() && (b[end] == b'.' || b[end] == b'/') && b[end + 1].is_ascii_digit() {
        end = integer(src, end + 1)?;
    }
    if end < b.len() && (b[end] == b'e' || b[end] == b'E') {
        let mut q = end + 1;
        if q < b.len() && (b[q] == b'-' || b[q] == b'+') {
            q += 1;
        }
        if let Some(e) = integer(src, q) {
            end = e;
        }
    }
    Some(end)
}

/// True when `s` can be printed as a bare TPTP name.
pub fn is_plain_name(s: &str) -> bool {
    lower_word(s, 0) == Some(s.len()) || (integer(s, 0) == Some(s.len()) && !s.is_empty())
}

/// Quotes `s` unless it is a bare name.
pub fn quote_name(s: &str) -> String {
    if is_plain_name(s) {
        s.to_owned()
    } else {
        let mut out = String::with_capacity(s.len() + 2);
        out.push('\'');
        for c in s.chars() {
            if c == '\'' || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
        out.push('\'');
        out
    }
}

/// Byte offset to 1-based line/column.
pub struct LineIndex {
    starts: Vec<usize>,
    src_len: usize,
    text: String,
}

impl LineIndex {
    pub fn new(src: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex {
            starts,
            src_len: src.len(),
            text: src.to_owned(),
        }
    }

    pub fn line_col(&self, pos: usize) -> (usize, usize) {
        let pos = pos.min(self.src_len);
        let line = self.starts.partition_point(|&s| s <= pos) - 1;
        let start = self.starts[line];
        let col = self.text.get(start..pos).map_or(pos - start, |s| s.chars().count());
        (line + 1, col + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_are_skipped() {
        let s = "  % hi\n /* block\n */ fof";
        assert_eq!(&s[skip_ws(s, 0)..], "fof");
    }

    #[test]
    fn line_columns() {
        let idx = LineIndex::new("ab\ncd");
        assert_eq!(idx.line_col(0), (1, 1));
        assert_eq!(idx.line_col(3), (2, 1));
        assert_eq!(idx.line_col(4), (2, 2));
    }

    #[test]
    fn quoting() {
        assert_eq!(quote_name("abc"), "abc");
        assert_eq!(quote_name("Abc"), "'Abc'");
        assert_eq!(quote_name("a'b"), "'a\\'b'");
        assert_eq!(unquote("'a\\'b'"), "a'b");
        assert_eq!(quote_name("12"), "12");
    }
}
