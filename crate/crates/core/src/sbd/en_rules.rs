use std::sync::OnceLock;

use regex::Regex;

use super::{cut_at_spaces, whitespace_len, AbbrevList};

const TERMINATORS: [char; 3] = ['.', '?', '!'];
const CLOSERS: [char; 6] = ['"', '\'', ')', ']', '”', '’'];
const OPENERS: [char; 5] = ['"', '\'', '(', '[', '“'];

fn citation_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[0-9]{1,3}(?:[-–,][0-9]{1,3})*").expect("valid citation pattern"))
}

fn starts_upper_or_digit(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_uppercase() || c.is_ascii_digit())
}

/// Byte offset just past the `)` matching the `(` at the start of `s`.
fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

/// Whether the text at `rest` can open a new sentence after a terminator.
/// `after_period` enables the trailing-parenthetical rule.
fn opens_sentence(rest: &str, after_period: bool) -> bool {
    let Some(first) = rest.chars().next() else {
        return false;
    };
    if first == '(' && after_period {
        if let Some(close) = matching_paren(rest) {
            if rest[close..].starts_with('.') {
                return false;
            }
        }
    }
    if OPENERS.contains(&first) {
        return starts_upper_or_digit(&rest[first.len_utf8()..]);
    }
    starts_upper_or_digit(rest)
}

/// Whether the period at byte `at` belongs to an abbreviation or initial.
fn period_is_abbreviation(text: &str, at: usize, abbrevs: &AbbrevList) -> bool {
    let before = &text[..at];
    let word_start = before.rfind(char::is_whitespace).map_or(0, |i| i + before[i..].chars().next().map_or(1, char::len_utf8));
    let word = before[word_start..].trim_start_matches(OPENERS);
    if word.is_empty() {
        return false;
    }
    let mut chars = word.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if c.is_alphabetic() && c.is_uppercase() {
            return true;
        }
    }
    if abbrevs.contains(word) {
        return true;
    }
    let lower = before.to_lowercase();
    abbrevs.phrases().any(|p| {
        lower.ends_with(p) && {
            let cut = lower.len() - p.len();
            lower[..cut].chars().next_back().is_none_or(|c| !c.is_alphanumeric())
        }
    })
}

/// Rule-based English sentence splitter.
///
/// A sentence ends at `.`, `?` or `!` (runs of them stay together, closing
/// quotes and brackets attach left) when a space follows and the next text
/// starts with an uppercase letter, a digit, or an opening quote or bracket
/// before one. A period does not end a sentence after an abbreviation or a
/// single capital initial, nor when the following parenthetical itself
/// closes with `).`; citation numbers glued to a period (`reported.12-14`)
/// stay with the sentence they follow.
pub fn segment_en_rules(paragraph: &str, abbrevs: &AbbrevList) -> Vec<String> {
    let text = paragraph.trim();
    let mut runs = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let c = text[pos..].chars().next().expect("pos on a char boundary");
        if !TERMINATORS.contains(&c) {
            pos += c.len_utf8();
            continue;
        }
        let term = pos;
        let mut end = pos;
        let mut has_period = false;
        for n in text[pos..].chars() {
            if TERMINATORS.contains(&n) {
                has_period |= n == '.';
                end += n.len_utf8();
            } else {
                break;
            }
        }
        let single_period = has_period && end == term + 1;
        for n in text[end..].chars() {
            if CLOSERS.contains(&n) {
                end += n.len_utf8();
            } else {
                break;
            }
        }
        if single_period {
            if let Some(m) = citation_re().find(&text[end..]) {
                end += m.end();
            }
        }
        let ws = whitespace_len(text, end);
        let boundary = ws > 0
            && end + ws < text.len()
            && opens_sentence(&text[end + ws..], has_period)
            && !(single_period && period_is_abbreviation(text, term, abbrevs));
        if boundary {
            runs.push((end, end + ws));
        }
        pos = end.max(pos + 1);
    }
    cut_at_spaces(text, &runs)
}
