//! Sentence boundary detection.
//!
//! Chinese is split at its three full-stop marks. English has two
//! segmenters: a rule-based one that knows about abbreviations, citations
//! and trailing parentheticals, and an unsupervised Punkt-style one.
//!
//! Every segmenter is lossless: joining its output with the language joiner
//! reproduces the input up to leading and trailing whitespace.

mod abbrev;
mod en_rules;
pub mod punkt;
mod report;
mod zh;

pub use abbrev::{AbbrevList, DEFAULT_ABBREVIATIONS};
pub use en_rules::segment_en_rules;
pub use punkt::{segment_punkt, train_punkt, PunktModel, PunktParams};
pub use report::{quartiles, sbd_diff_report, DiffReport, DiffRow};
pub use zh::segment_zh;

use crate::model::{Document, Lang, SentenceList};

/// Which English segmenter to run.
#[derive(Debug, Clone)]
pub enum EnSegmenter {
    Rules(AbbrevList),
    Punkt(PunktModel),
}

impl EnSegmenter {
    pub fn segment(&self, paragraph: &str) -> Vec<String> {
        match self {
            EnSegmenter::Rules(a) => segment_en_rules(paragraph, a),
            EnSegmenter::Punkt(m) => segment_punkt(paragraph, m),
        }
    }
}

/// Splits one paragraph in the given language.
pub fn segment_paragraph(paragraph: &str, lang: Lang, en: &EnSegmenter) -> Vec<String> {
    match lang {
        Lang::Zh => segment_zh(paragraph),
        Lang::En => en.segment(paragraph),
    }
}

/// Splits every paragraph of a document.
pub fn segment_document(doc: &Document, en: &EnSegmenter) -> SentenceList {
    let lang = doc.lang();
    SentenceList::segment(doc, |p| segment_paragraph(p, lang, en))
}

/// Cuts `text` at whitespace runs `[start, end)`. A run becomes a boundary
/// only if it ends with a plain space; that space is the joiner and the rest
/// of the run stays on the left, so joining with `" "` restores the text.
pub(crate) fn cut_at_spaces(text: &str, runs: &[(usize, usize)]) -> Vec<String> {
    let mut out = Vec::new();
    let mut from = 0;
    for &(a, b) in runs {
        if b <= a || !text[a..b].ends_with(' ') || a <= from {
            continue;
        }
        out.push(text[from..b - 1].to_string());
        from = b;
    }
    if from < text.len() {
        out.push(text[from..].to_string());
    }
    out
}

/// Byte length of the whitespace run starting at `at`.
pub(crate) fn whitespace_len(text: &str, at: usize) -> usize {
    text[at..].chars().take_while(|c| c.is_whitespace()).map(char::len_utf8).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_keeps_extra_whitespace_on_the_left() {
        let t = "A b.  C d.\tE.";
        let parts = cut_at_spaces(t, &[(4, 6), (10, 11)]);
        assert_eq!(parts, ["A b. ", "C d.\tE."]);
        assert_eq!(parts.join(" "), t);
    }
}
