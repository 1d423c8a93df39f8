/// Sentence-final marks.
const TERMINATORS: [char; 3] = ['。', '！', '？'];

/// Closing quotes and brackets that stay with the sentence they close.
const CLOSERS: [char; 12] = ['」', '』', '”', '’', '"', '\'', '）', ')', '】', '》', '〕', ']'];

fn is_superscript_digit(c: char) -> bool {
    matches!(c, '⁰' | '¹' | '²' | '³' | '⁴'..='⁹')
}

/// Length in bytes of a citation run such as `12-14` or `³,⁵` at the start
/// of `rest`, if it belongs to the sentence before it: superscript digits
/// always do; plain digits only when followed by whitespace or the end, so a
/// sentence opening with a number is not swallowed.
fn citation_len(rest: &str) -> Option<usize> {
    let mut len = 0;
    let mut superscript = false;
    let mut last_digit = false;
    for c in rest.chars() {
        if c.is_ascii_digit() || is_superscript_digit(c) {
            superscript |= is_superscript_digit(c);
            last_digit = true;
        } else if matches!(c, '-' | '–' | ',' | '⁻') && last_digit {
            last_digit = false;
        } else {
            break;
        }
        len += c.len_utf8();
    }
    // drop a dangling separator
    let body = rest[..len].trim_end_matches(['-', '–', ',', '⁻']);
    if body.is_empty() {
        return None;
    }
    let after = rest[body.len()..].chars().next();
    (superscript || after.is_none_or(char::is_whitespace)).then_some(body.len())
}

/// Splits a Chinese paragraph after `。！？`.
///
/// Runs of terminators stay together, closing quotes and brackets right
/// after them attach to the left, then a trailing citation, then any
/// whitespace. Sentences concatenate back to the trimmed paragraph.
pub fn segment_zh(paragraph: &str) -> Vec<String> {
    let text = paragraph.trim();
    let mut out = Vec::new();
    let mut start = 0;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if !TERMINATORS.contains(&c) {
            continue;
        }
        let mut end = i + c.len_utf8();
        let mut rest = text[end..].chars();
        while let Some(n) = rest.next().filter(|n| TERMINATORS.contains(n) || CLOSERS.contains(n)) {
            end += n.len_utf8();
        }
        if let Some(len) = citation_len(&text[end..]) {
            end += len;
        }
        end += super::whitespace_len(text, end);
        if end < text.len() {
            out.push(text[start..end].to_string());
            start = end;
        }
        while iter.peek().is_some_and(|&(j, _)| j < end) {
            iter.next();
        }
    }
    if start < text.len() {
        out.push(text[start..].to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_terminators() {
        assert_eq!(segment_zh("雨停了。我们走吧！真的？"), ["雨停了。", "我们走吧！", "真的？"]);
    }

    #[test]
    fn closing_quote_attaches_left() {
        assert_eq!(segment_zh("他说：\"走吧。\"然后离开了。"), ["他说：\"走吧。\"", "然后离开了。"]);
        assert_eq!(segment_zh("他说：「走吧。」然后离开了。"), ["他说：「走吧。」", "然后离开了。"]);
    }

    #[test]
    fn no_terminator_is_one_sentence() {
        assert_eq!(segment_zh("没有句号的段落"), ["没有句号的段落"]);
    }

    #[test]
    fn terminator_runs_stay_together() {
        assert_eq!(segment_zh("真的？！是的。"), ["真的？！", "是的。"]);
    }

    #[test]
    fn citations_after_terminator() {
        assert_eq!(segment_zh("已有报道。12-14 为克服"), ["已有报道。12-14 ", "为克服"]);
        assert_eq!(segment_zh("已有报道。¹²为克服"), ["已有报道。¹²", "为克服"]);
        // a number opening the next sentence stays there
        assert_eq!(segment_zh("结束。2019年开始。"), ["结束。", "2019年开始。"]);
    }

    #[test]
    fn parenthetical_before_terminator_stays() {
        let p = "与安慰剂组相比，腹泻在帕妥珠单抗组较为常见（由霍夫曼-罗氏公司资助）。下一句。";
        assert_eq!(segment_zh(p), ["与安慰剂组相比，腹泻在帕妥珠单抗组较为常见（由霍夫曼-罗氏公司资助）。", "下一句。"]);
    }
}
