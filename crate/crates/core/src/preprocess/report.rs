use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Document, Lang};

/// Paragraph counts of one article pair before and after preprocessing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParagraphCounts {
    pub pair_id: String,
    pub zh_pre: usize,
    pub en_pre: usize,
    pub zh_post: usize,
    pub en_post: usize,
}

impl ParagraphCounts {
    pub fn gap_pre(&self) -> usize {
        self.zh_pre.abs_diff(self.en_pre)
    }

    pub fn gap_post(&self) -> usize {
        self.zh_post.abs_diff(self.en_post)
    }
}

fn counts(pair: &(Document, Document)) -> (usize, usize) {
    let (a, b) = pair;
    if a.lang() == Lang::Zh {
        (a.paragraphs.len(), b.paragraphs.len())
    } else {
        (b.paragraphs.len(), a.paragraphs.len())
    }
}

/// One row per pre-processing pair, matched to `post` by pair id, plus the
/// rendered CSV.
pub fn paragraph_count_report(
    pre: &[(Document, Document)],
    post: &[(Document, Document)],
) -> Result<(Vec<ParagraphCounts>, String)> {
    let post_by_id: HashMap<&str, &(Document, Document)> =
        post.iter().map(|p| (p.0.meta.pair_id.as_str(), p)).collect();
    if post_by_id.len() != pre.len() {
        return Err(Error::Mismatch(format!(
            "{} article pairs before preprocessing but {} after",
            pre.len(),
            post_by_id.len()
        )));
    }
    let mut rows = Vec::with_capacity(pre.len());
    for p in pre {
        let id = p.0.meta.pair_id.as_str();
        let q = post_by_id
            .get(id)
            .ok_or_else(|| Error::Mismatch(format!("pair `{id}` has no post-processing counterpart")))?;
        let (zh_pre, en_pre) = counts(p);
        let (zh_post, en_post) = counts(q);
        rows.push(ParagraphCounts {
            pair_id: id.to_string(),
            zh_pre,
            en_pre,
            zh_post,
            en_post,
        });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(["pair_id", "zh_pre", "en_pre", "zh_post", "en_post"])?;
    }
    for r in &rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<csv buffer>".into(),
        source: e.into_error(),
    })?;
    Ok((rows, String::from_utf8(bytes).expect("csv output is UTF-8")))
}
