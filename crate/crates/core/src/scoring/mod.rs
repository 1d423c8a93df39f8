//! Tokenization and BLEU.

mod bleu;

pub use bleu::{corpus_bleu, sentence_bleu, BleuConfig, BleuStats, NgramProfile};

use crate::model::Lang;

/// True for Han ideographs and the CJK symbol/punctuation blocks.
pub fn is_cjk(c: char) -> bool {
    matches!(c,
        '\u{3400}'..='\u{4DBF}'
        | '\u{4E00}'..='\u{9FFF}'
        | '\u{F900}'..='\u{FAFF}'
        | '\u{20000}'..='\u{2A6DF}'
        | '\u{2A700}'..='\u{2EBEF}'
        | '\u{30000}'..='\u{3134F}')
}

/// Splits text into tokens.
///
/// English: whitespace-separated words with punctuation split off, except
/// punctuation flanked by alphanumerics on both sides (`2.5`, `don't`,
/// `PAOLA-1`). Chinese: one token per Han character; Latin/digit runs follow
/// the English rule.
pub fn tokenize(text: &str, lang: Lang) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, tokens: &mut Vec<String>| {
        if !cur.is_empty() {
            tokens.push(std::mem::take(cur));
        }
    };
    let word_char = |c: char| c.is_alphanumeric() && !(lang == Lang::Zh && is_cjk(c));
    for (i, &c) in chars.iter().enumerate() {
        if c.is_whitespace() {
            flush(&mut cur, &mut tokens);
        } else if lang == Lang::Zh && is_cjk(c) {
            flush(&mut cur, &mut tokens);
            tokens.push(c.to_string());
        } else if word_char(c) {
            cur.push(c);
        } else {
            let inner = i > 0
                && i + 1 < chars.len()
                && word_char(chars[i - 1])
                && word_char(chars[i + 1])
                && !cur.is_empty();
            if inner {
                cur.push(c);
            } else {
                flush(&mut cur, &mut tokens);
                tokens.push(c.to_string());
            }
        }
    }
    flush(&mut cur, &mut tokens);
    tokens
}
