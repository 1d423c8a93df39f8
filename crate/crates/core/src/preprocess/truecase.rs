use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Document, Lang};
use crate::scoring::tokenize;

/// Most frequent surface form of each word, keyed by its lowercase form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TruecaseModel {
    pub casing: BTreeMap<String, (String, u64)>,
}

impl TruecaseModel {
    pub fn is_empty(&self) -> bool {
        self.casing.is_empty()
    }

    pub fn form(&self, word: &str) -> Option<&str> {
        self.casing.get(&word.to_lowercase()).map(|(f, _)| f.as_str())
    }

    /// `lowercase<TAB>form<TAB>count`, one word per line.
    pub fn to_tsv(&self) -> String {
        self.casing.iter().map(|(k, (f, c))| format!("{k}\t{f}\t{c}\n")).collect()
    }

    pub fn from_tsv(text: &str, path: &Path) -> Result<Self> {
        let mut casing = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let count = (f.len() == 3).then(|| f[2].parse::<u64>().ok()).flatten();
            match count {
                Some(c) if f[1].to_lowercase() == f[0] => {
                    casing.insert(f[0].to_string(), (f[1].to_string(), c));
                }
                _ => return Err(Error::parse(path, n + 1, "expected `lowercase<TAB>form<TAB>count`")),
            }
        }
        Ok(TruecaseModel { casing })
    }
}

fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphabetic)
}

fn ends_sentence(token: &str) -> bool {
    matches!(token, "." | "?" | "!")
}

/// Counts the casing of every word that does not start a paragraph or follow
/// a sentence-final `.`, `?` or `!`. The majority form wins; ties go to the
/// form seen first. Chinese documents are skipped.
pub fn train_truecaser(corpus: &[Document]) -> TruecaseModel {
    // lowercase -> (surface -> (count, first seen))
    let mut counts: BTreeMap<String, BTreeMap<String, (u64, u64)>> = BTreeMap::new();
    let mut seen = 0u64;
    for doc in corpus.iter().filter(|d| d.lang() == Lang::En) {
        for para in &doc.paragraphs {
            let tokens = tokenize(para, Lang::En);
            let mut initial = true;
            for tok in &tokens {
                if is_word(tok) {
                    if !initial {
                        let entry = counts.entry(tok.to_lowercase()).or_default().entry(tok.clone()).or_insert((0, seen));
                        entry.0 += 1;
                        seen += 1;
                    }
                    initial = false;
                } else if ends_sentence(tok) {
                    initial = true;
                }
            }
        }
    }
    let casing = counts
        .into_iter()
        .filter_map(|(key, forms)| {
            forms
                .into_iter()
                .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
                .filter(|(form, _)| form.to_lowercase() == key)
                .map(|(form, (count, _))| (key, (form, count)))
        })
        .collect();
    TruecaseModel { casing }
}

/// Byte range of the first word: leading non-alphanumerics are skipped and
/// the word runs while characters are alphanumeric, allowing single inner
/// `-` or `'`.
fn first_word(text: &str) -> Option<(usize, usize)> {
    let start = text.char_indices().find(|(_, c)| c.is_alphanumeric())?.0;
    let mut end = start;
    let mut iter = text[start..].char_indices().peekable();
    while let Some((off, c)) = iter.next() {
        if c.is_alphanumeric() {
            end = start + off + c.len_utf8();
        } else if matches!(c, '-' | '\'') && iter.peek().is_some_and(|(_, n)| n.is_alphanumeric()) {
            continue;
        } else {
            break;
        }
    }
    Some((start, end))
}

/// Replaces the first word of `text` by its model casing, if the model knows
/// the word.
pub fn truecase_first_token(text: &str, model: &TruecaseModel) -> String {
    let Some((s, e)) = first_word(text) else {
        return text.to_string();
    };
    match model.form(&text[s..e]) {
        Some(form) if form != &text[s..e] => format!("{}{}{}", &text[..s], form, &text[e..]),
        _ => text.to_string(),
    }
}

/// Truecases the first word of every paragraph of an English document.
pub fn apply_truecaser(doc: &Document, model: &TruecaseModel) -> Document {
    if doc.lang() != Lang::En || model.is_empty() {
        return doc.clone();
    }
    Document {
        meta: doc.meta.clone(),
        paragraphs: doc.paragraphs.iter().map(|p| truecase_first_token(p, model)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ArticleMeta;
    use chrono::NaiveDate;

    fn doc(lang: Lang, paras: Vec<String>) -> Document {
        Document {
            meta: ArticleMeta {
                id: "a".into(),
                pair_id: "p".into(),
                language: lang,
                date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
                article_type: String::new(),
            },
            paragraphs: paras,
        }
    }

    #[test]
    fn majority_lowercase_wins() {
        let mut paras: Vec<String> = (0..100).map(|_| "We saw the patient".to_string()).collect();
        paras.push("We saw The patient and The doctor".into());
        let model = train_truecaser(&[doc(Lang::En, paras)]);
        assert_eq!(model.casing["the"], ("the".to_string(), 100));
        let out = apply_truecaser(&doc(Lang::En, vec!["The patient recovered.".into()]), &model);
        assert_eq!(out.paragraphs, ["the patient recovered."]);
    }

    #[test]
    fn acronyms_stay() {
        let model = train_truecaser(&[doc(Lang::En, vec!["Data from WHO and the WHO site.".into()])]);
        assert_eq!(truecase_first_token("WHO reported it.", &model), "WHO reported it.");
    }

    #[test]
    fn ties_go_to_first_seen() {
        let model = train_truecaser(&[doc(Lang::En, vec!["a Foo b foo".into()])]);
        assert_eq!(model.form("foo"), Some("Foo"));
    }

    #[test]
    fn sentence_initial_tokens_are_not_counted() {
        let model = train_truecaser(&[doc(Lang::En, vec!["Alpha beta. Gamma delta? Epsilon".into()])]);
        assert!(model.form("alpha").is_none() && model.form("gamma").is_none() && model.form("epsilon").is_none());
        assert_eq!(model.form("beta"), Some("beta"));
    }

    #[test]
    fn empty_and_chinese_are_identity() {
        let model = train_truecaser(&[]);
        assert!(model.is_empty());
        let d = doc(Lang::En, vec!["The end.".into()]);
        assert_eq!(apply_truecaser(&d, &model), d);
        let zh = doc(Lang::Zh, vec!["The 试验。".into()]);
        assert!(train_truecaser(&[zh]).is_empty());
    }

    #[test]
    fn leading_punctuation_and_unknown_words() {
        let model = train_truecaser(&[doc(Lang::En, vec!["x the y".into()])]);
        assert_eq!(truecase_first_token("(The study)", &model), "(the study)");
        assert_eq!(truecase_first_token("Zebra study", &model), "Zebra study");
        assert_eq!(truecase_first_token("...", &model), "...");
    }

    #[test]
    fn tsv_round_trip() {
        let model = train_truecaser(&[doc(Lang::En, vec!["x the WHO y".into()])]);
        assert_eq!(TruecaseModel::from_tsv(&model.to_tsv(), Path::new("m")).unwrap(), model);
    }
}
