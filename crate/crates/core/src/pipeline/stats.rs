use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::Lang;
use crate::scoring::tokenize;

/// One row of a bitext, tagged with the article it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitextRow {
    pub article: String,
    pub src: String,
    pub tgt: String,
}

/// Corpus size measured with [`tokenize`]: Chinese counts one token per
/// CJK character, English one per word or punctuation mark.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sentence_pairs: usize,
    pub src_tokens: usize,
    pub tgt_tokens: usize,
    pub articles: usize,
}

pub fn corpus_stats(bitext: &[BitextRow], langs: (Lang, Lang)) -> CorpusStats {
    let articles: BTreeSet<&str> = bitext.iter().map(|r| r.article.as_str()).collect();
    CorpusStats {
        sentence_pairs: bitext.len(),
        src_tokens: bitext.iter().map(|r| tokenize(&r.src, langs.0).len()).sum(),
        tgt_tokens: bitext.iter().map(|r| tokenize(&r.tgt, langs.1).len()).sum(),
        articles: articles.len(),
    }
}
