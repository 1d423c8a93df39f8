//! Paragraph-level cleanup ahead of sentence splitting: character
//! normalization, repair of broken paragraphs, boilerplate removal and
//! truecasing.

mod filter;
mod normalize;
mod report;
mod stitch;
mod truecase;

pub use filter::{filter_boilerplate, FilterRule, FilterRules, MatchKind, Removal, DEFAULT_PATTERNS};
pub use normalize::normalize_text;
pub use report::{paragraph_count_report, ParagraphCounts};
pub use stitch::{is_citation_fragment, stitch_paragraphs, StitchEvent, LINK_PHRASE};
pub use truecase::{apply_truecaser, train_truecaser, truecase_first_token, TruecaseModel};

use crate::model::Document;

/// Normalizes every paragraph and drops the ones left empty.
pub fn normalize_document(doc: &Document) -> Document {
    let lang = doc.lang();
    Document {
        meta: doc.meta.clone(),
        paragraphs: doc
            .paragraphs
            .iter()
            .map(|p| normalize_text(p, lang).trim().to_string())
            .filter(|p| !p.is_empty())
            .collect(),
    }
}
