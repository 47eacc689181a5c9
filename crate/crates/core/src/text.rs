//! Small text helpers shared by the pipeline and the metrics.

/// Default glyphs treated as bare currency marks.
pub const DEFAULT_CURRENCY_GLYPHS: &str = "$¢£€";

pub fn is_blank(text: &str) -> bool {
    text.trim().is_empty()
}

/// Trim and collapse internal whitespace runs to a single space.
pub fn normalize(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A token made only of periods (whitespace ignored). Returns the number of
/// periods, or `None` for anything else.
pub fn leader_dots(token: &str) -> Option<usize> {
    let mut dots = 0;
    for ch in token.chars() {
        match ch {
            '.' => dots += 1,
            c if c.is_whitespace() => {}
            _ => return None,
        }
    }
    (dots > 0).then_some(dots)
}

/// Remove a run of leader dots (periods and whitespace, at least `min_dots`
/// periods) from either end of `text`.
pub fn strip_leader_text(text: &str, min_dots: usize) -> String {
    let is_leader_char = |c: char| c == '.' || c.is_whitespace();
    let mut s = text.trim();

    let tail_start = s
        .char_indices()
        .rev()
        .take_while(|&(_, c)| is_leader_char(c))
        .last()
        .map(|(i, _)| i);
    if let Some(i) = tail_start {
        if s[i..].matches('.').count() >= min_dots {
            s = s[..i].trim_end();
        }
    }

    let head_len: usize = s
        .chars()
        .take_while(|&c| is_leader_char(c))
        .map(char::len_utf8)
        .sum();
    if s[..head_len].matches('.').count() >= min_dots {
        s = s[head_len..].trim_start();
    }
    s.to_string()
}

/// True when the text is made only of currency glyphs, optionally wrapped in
/// parentheses and whitespace.
pub fn is_currency_only(text: &str, glyphs: &str) -> bool {
    let mut any = false;
    for ch in text.chars() {
        if glyphs.contains(ch) {
            any = true;
        } else if !(ch.is_whitespace() || ch == '(' || ch == ')') {
            return false;
        }
    }
    any
}

/// Financial-style number: after dropping currency glyphs, commas,
/// parentheses, percent signs and whitespace the rest parses as a decimal.
pub fn is_numeric_like(text: &str, glyphs: &str) -> bool {
    let rest: String = text
        .chars()
        .filter(|&c| !(glyphs.contains(c) || matches!(c, ',' | '(' | ')' | '%') || c.is_whitespace()))
        .collect();
    if rest.is_empty() || !rest.chars().any(|c| c.is_ascii_digit()) {
        return false;
    }
    if !rest.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+')) {
        return false;
    }
    rest.parse::<f64>().is_ok()
}

/// Length of the longest common subsequence of two char sequences.
pub fn lcs_len(a: &[char], b: &[char]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for &ca in a {
        for (j, &cb) in b.iter().enumerate() {
            cur[j + 1] = if ca == cb {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
