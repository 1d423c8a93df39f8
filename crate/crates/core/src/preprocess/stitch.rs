use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;

use crate::model::{Document, Lang};

/// Hyperlink text that splits English sentences across paragraphs.
pub const LINK_PHRASE: &str = "open in new tab";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum StitchEvent {
    /// Citation or punctuation fragment joined to the paragraph before it.
    Appended { fragment: usize, onto: usize },
    /// Fragment at the start of the document, kept as is.
    Orphan { fragment: usize },
    /// Link phrase deleted and its neighbours joined.
    LinkRemoved { paragraph: usize },
}

fn fragment_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"^[0-9０-９⁰¹²³⁴⁵⁶⁷⁸⁹\-–,，.。;；:：!?！？"\[\]()（）\s]+$"#).expect("valid fragment pattern")
    })
}

fn link_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\s*\bopen in new tab\b\s*").expect("valid link pattern"))
}

/// True for a paragraph made only of citation numbers and punctuation.
pub fn is_citation_fragment(paragraph: &str) -> bool {
    fragment_re().is_match(paragraph)
}

/// Repairs paragraphs that were broken apart during extraction.
///
/// Chinese: a citation/punctuation-only paragraph is appended to the one
/// before it. English: every occurrence of the link phrase is deleted and
/// the text on either side, across paragraph breaks, is joined by one space.
pub fn stitch_paragraphs(doc: &Document) -> (Document, Vec<StitchEvent>) {
    let mut log = Vec::new();
    let paragraphs = match doc.lang() {
        Lang::Zh => stitch_zh(&doc.paragraphs, &mut log),
        Lang::En => stitch_en(&doc.paragraphs, &mut log),
    };
    (
        Document {
            meta: doc.meta.clone(),
            paragraphs,
        },
        log,
    )
}

fn stitch_zh(paragraphs: &[String], log: &mut Vec<StitchEvent>) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(paragraphs.len());
    let mut origin: Vec<usize> = Vec::with_capacity(paragraphs.len());
    for (k, p) in paragraphs.iter().enumerate() {
        if is_citation_fragment(p) {
            if let Some(last) = out.last_mut() {
                last.push_str(p.trim());
                log.push(StitchEvent::Appended {
                    fragment: k,
                    onto: *origin.last().expect("origin tracks output"),
                });
                continue;
            }
            log.push(StitchEvent::Orphan { fragment: k });
        }
        out.push(p.clone());
        origin.push(k);
    }
    out
}

fn stitch_en(paragraphs: &[String], log: &mut Vec<StitchEvent>) -> Vec<String> {
    let mut any = false;
    for (k, p) in paragraphs.iter().enumerate() {
        if link_re().is_match(p) {
            log.push(StitchEvent::LinkRemoved { paragraph: k });
            any = true;
        }
    }
    if !any {
        return paragraphs.to_vec();
    }
    let joined = paragraphs.join("\n");
    link_re()
        .replace_all(&joined, " ")
        .split('\n')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::to_string)
        .collect()
}
