//! Domain types shared by every stage: documents, sentence lists and
//! alignment beads, plus structural validation of alignments.

mod io;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{
    read_alignments, read_documents, read_gold, read_lines, read_sentences, write_alignments,
    write_documents, write_gold, write_lines, write_sentences, META_FILE,
};

/// Language of one side of the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Lang {
    Zh,
    En,
}

impl Lang {
    pub fn code(self) -> &'static str {
        match self {
            Lang::Zh => "zh",
            Lang::En => "en",
        }
    }

    /// String used to glue consecutive sentences of one paragraph back together.
    pub fn joiner(self) -> &'static str {
        match self {
            Lang::Zh => "",
            Lang::En => " ",
        }
    }

    pub fn join<S: AsRef<str>>(self, parts: &[S]) -> String {
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i > 0 {
                out.push_str(self.joiner());
            }
            out.push_str(p.as_ref());
        }
        out
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Lang {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zh" => Ok(Lang::Zh),
            "en" => Ok(Lang::En),
            other => Err(Error::UnknownLanguage(other.to_string())),
        }
    }
}

impl TryFrom<String> for Lang {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Lang> for String {
    fn from(l: Lang) -> String {
        l.code().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleMeta {
    pub id: String,
    pub pair_id: String,
    pub language: Lang,
    pub date: NaiveDate,
    #[serde(default)]
    pub article_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub meta: ArticleMeta,
    pub paragraphs: Vec<String>,
}

impl Document {
    pub fn lang(&self) -> Lang {
        self.meta.language
    }
}

/// Segmented sentences of one document, each tagged with the paragraph it
/// came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceList {
    pub doc_id: String,
    pub lang: Lang,
    pub sentences: Vec<String>,
    pub paragraph_index: Vec<usize>,
}

impl SentenceList {
    pub fn new(doc_id: impl Into<String>, lang: Lang) -> Self {
        SentenceList {
            doc_id: doc_id.into(),
            lang,
            sentences: Vec::new(),
            paragraph_index: Vec::new(),
        }
    }

    /// Builds a list where every sentence is its own paragraph.
    pub fn from_sentences<S: Into<String>>(
        doc_id: impl Into<String>,
        lang: Lang,
        sentences: impl IntoIterator<Item = S>,
    ) -> Self {
        let sentences: Vec<String> = sentences.into_iter().map(Into::into).collect();
        let paragraph_index = (0..sentences.len()).collect();
        SentenceList {
            doc_id: doc_id.into(),
            lang,
            sentences,
            paragraph_index,
        }
    }

    /// Segments every paragraph of `doc` with `segment`, dropping empty output.
    pub fn segment<F>(doc: &Document, mut segment: F) -> Self
    where
        F: FnMut(&str) -> Vec<String>,
    {
        let mut list = SentenceList::new(doc.meta.id.clone(), doc.lang());
        for (p, para) in doc.paragraphs.iter().enumerate() {
            for s in segment(para) {
                if !s.trim().is_empty() {
                    list.push(s, p);
                }
            }
        }
        list
    }

    pub fn push(&mut self, sentence: impl Into<String>, paragraph: usize) {
        self.sentences.push(sentence.into());
        self.paragraph_index.push(paragraph);
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Number of distinct paragraphs the sentences span.
    pub fn paragraph_count(&self) -> usize {
        let mut n = 0;
        let mut last = None;
        for &p in &self.paragraph_index {
            if last != Some(p) {
                n += 1;
                last = Some(p);
            }
        }
        n
    }

    /// Contiguous sentence ranges sharing a paragraph index, in order.
    pub fn paragraph_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut ranges = Vec::new();
        let mut start = 0;
        for i in 1..=self.len() {
            if i == self.len() || self.paragraph_index[i] != self.paragraph_index[start] {
                if i > start {
                    ranges.push(start..i);
                }
                start = i;
            }
        }
        ranges
    }

    /// Text of the sentences at `indices` joined with the language joiner.
    pub fn joined(&self, indices: &[usize]) -> String {
        let parts: Vec<&str> = indices.iter().map(|&i| self.sentences[i].as_str()).collect();
        self.lang.join(&parts)
    }
}

/// Shape of a bead: number of source and target sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeadType {
    pub src: usize,
    pub tgt: usize,
}

impl BeadType {
    pub const fn new(src: usize, tgt: usize) -> Self {
        BeadType { src, tgt }
    }

    pub const ZERO_ONE: BeadType = BeadType::new(0, 1);
    pub const ONE_ZERO: BeadType = BeadType::new(1, 0);
    pub const ONE_ONE: BeadType = BeadType::new(1, 1);
    pub const ONE_TWO: BeadType = BeadType::new(1, 2);
    pub const TWO_ONE: BeadType = BeadType::new(2, 1);
    pub const TWO_TWO: BeadType = BeadType::new(2, 2);
    pub const TWO_THREE: BeadType = BeadType::new(2, 3);

    /// Every bead shape an alignment may contain.
    pub const ALLOWED: [BeadType; 7] = [
        BeadType::ZERO_ONE,
        BeadType::ONE_ZERO,
        BeadType::ONE_ONE,
        BeadType::ONE_TWO,
        BeadType::TWO_ONE,
        BeadType::TWO_TWO,
        BeadType::TWO_THREE,
    ];

    pub fn is_allowed(self) -> bool {
        BeadType::ALLOWED.contains(&self)
    }

    pub fn is_one_to_one(self) -> bool {
        self == BeadType::ONE_ONE
    }

    /// Both sides hold more than zero sentences and at least one holds more than one.
    pub fn is_many(self) -> bool {
        self.src > 0 && self.tgt > 0 && (self.src > 1 || self.tgt > 1)
    }
}

impl fmt::Display for BeadType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src, self.tgt)
    }
}

impl FromStr for BeadType {
    type Err = Error;

    /// Parses `m-n`.
    fn from_str(s: &str) -> Result<Self> {
        s.split_once('-')
            .and_then(|(a, b)| Some(BeadType::new(a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| Error::InvalidParameter(format!("bad bead type `{s}`, expected m-n")))
    }
}

impl Serialize for BeadType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BeadType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bead {
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    /// Higher is better. `None` for hand-annotated beads.
    pub score: Option<f64>,
    pub method: String,
}

impl Bead {
    pub fn new(src: Vec<usize>, tgt: Vec<usize>, score: Option<f64>, method: impl Into<String>) -> Self {
        Bead {
            src,
            tgt,
            score,
            method: method.into(),
        }
    }

    pub fn one_to_one(src: usize, tgt: usize, score: f64, method: impl Into<String>) -> Self {
        Bead::new(vec![src], vec![tgt], Some(score), method)
    }

    pub fn bead_type(&self) -> BeadType {
        bead_type(self)
    }

    /// Index sets only; scores and method tags are ignored.
    pub fn same_link(&self, other: &Bead) -> bool {
        self.src == other.src && self.tgt == other.tgt
    }
}

pub fn bead_type(bead: &Bead) -> BeadType {
    BeadType::new(bead.src.len(), bead.tgt.len())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlignmentSet {
    pub beads: Vec<Bead>,
    pub src_len: usize,
    pub tgt_len: usize,
}

impl AlignmentSet {
    pub fn new(src_len: usize, tgt_len: usize) -> Self {
        AlignmentSet {
            beads: Vec::new(),
            src_len,
            tgt_len,
        }
    }

    pub fn with_beads(beads: Vec<Bead>, src_len: usize, tgt_len: usize) -> Self {
        AlignmentSet {
            beads,
            src_len,
            tgt_len,
        }
    }

    pub fn len(&self) -> usize {
        self.beads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beads.is_empty()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_alignment(self)
    }

    pub fn contains_link(&self, bead: &Bead) -> bool {
        self.beads.iter().any(|b| b.same_link(bead))
    }
}

/// Reference alignment with an optional annotator note per bead.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GoldAlignment {
    pub alignment: AlignmentSet,
    pub notes: Vec<Option<String>>,
}

impl GoldAlignment {
    pub fn new(alignment: AlignmentSet) -> Self {
        let notes = vec![None; alignment.beads.len()];
        GoldAlignment { alignment, notes }
    }

    pub fn beads(&self) -> &[Bead] {
        &self.alignment.beads
    }

    /// Alignment invariants plus full coverage of both sides.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = validate_alignment(&self.alignment);
        if self.notes.len() != self.alignment.beads.len() {
            out.push(Violation {
                bead: None,
                rule: Rule::NoteCount,
            });
        }
        let mut src_seen = vec![false; self.alignment.src_len];
        let mut tgt_seen = vec![false; self.alignment.tgt_len];
        for b in &self.alignment.beads {
            for &i in &b.src {
                if let Some(s) = src_seen.get_mut(i) {
                    *s = true;
                }
            }
            for &j in &b.tgt {
                if let Some(s) = tgt_seen.get_mut(j) {
                    *s = true;
                }
            }
        }
        for (i, seen) in src_seen.iter().enumerate() {
            if !seen {
                out.push(Violation {
                    bead: None,
                    rule: Rule::Uncovered { side: Side::Src, index: i },
                });
            }
        }
        for (j, seen) in tgt_seen.iter().enumerate() {
            if !seen {
                out.push(Violation {
                    bead: None,
                    rule: Rule::Uncovered { side: Side::Tgt, index: j },
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Src,
    Tgt,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Src => "source",
            Side::Tgt => "target",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    EmptyBead,
    UnsupportedType(BeadType),
    NonContiguous(Side),
    OutOfRange(Side),
    IndexReuse(Side),
    Monotonicity(Side),
    Uncovered { side: Side, index: usize },
    NoteCount,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::EmptyBead => f.write_str("empty bead"),
            Rule::UnsupportedType(t) => write!(f, "unsupported bead type {t}"),
            Rule::NonContiguous(s) => write!(f, "{s} indices not contiguous and increasing"),
            Rule::OutOfRange(s) => write!(f, "{s} index out of range"),
            Rule::IndexReuse(s) => write!(f, "index reuse on {s} side"),
            Rule::Monotonicity(s) => write!(f, "monotonicity broken on {s} side"),
            Rule::Uncovered { side, index } => write!(f, "{side} sentence {index} not covered"),
            Rule::NoteCount => f.write_str("note count differs from bead count"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub bead: Option<usize>,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bead {
            Some(b) => write!(f, "bead {b}: {}", self.rule),
            None => write!(f, "{}", self.rule),
        }
    }
}

/// Checks every structural invariant of an alignment and reports one entry
/// per (bead, rule) that fails. An empty result means the set is valid.
pub fn validate_alignment(set: &AlignmentSet) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut used_src = HashSet::new();
    let mut used_tgt = HashSet::new();
    let mut max_src: Option<usize> = None;
    let mut max_tgt: Option<usize> = None;

    for (k, bead) in set.beads.iter().enumerate() {
        let mut report = |rule: Rule| {
            let v = Violation { bead: Some(k), rule };
            if !out.contains(&v) {
                out.push(v);
            }
        };
        let ty = bead.bead_type();
        if ty.src == 0 && ty.tgt == 0 {
            report(Rule::EmptyBead);
            continue;
        }
        if !ty.is_allowed() {
            report(Rule::UnsupportedType(ty));
        }
        for (side, indices, len, used, max) in [
            (Side::Src, &bead.src, set.src_len, &mut used_src, &mut max_src),
            (Side::Tgt, &bead.tgt, set.tgt_len, &mut used_tgt, &mut max_tgt),
        ] {
            if indices.windows(2).any(|w| w[1] != w[0] + 1) {
                report(Rule::NonContiguous(side));
            }
            for &i in indices.iter() {
                if i >= len {
                    report(Rule::OutOfRange(side));
                }
                if used.contains(&i) {
                    report(Rule::IndexReuse(side));
                } else if max.is_some_and(|m| i < m) {
                    report(Rule::Monotonicity(side));
                }
            }
            for &i in indices.iter() {
                used.insert(i);
                *max = Some(max.map_or(i, |m| m.max(i)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(src: &[usize], tgt: &[usize]) -> Bead {
        Bead::new(src.to_vec(), tgt.to_vec(), Some(0.0), "t")
    }

    #[test]
    fn bead_types() {
        assert_eq!(bead_type(&b(&[3], &[7])), BeadType::new(1, 1));
        assert_eq!(bead_type(&b(&[], &[0])), BeadType::new(0, 1));
        assert_eq!(bead_type(&b(&[4, 5], &[9, 10, 11])), BeadType::new(2, 3));
    }

    #[test]
    fn valid_minimal_set() {
        let set = AlignmentSet::with_beads(vec![b(&[0], &[0]), b(&[1], &[1])], 2, 2);
        assert!(validate_alignment(&set).is_empty());
    }

    #[test]
    fn crossing_is_one_monotonicity_violation() {
        let set = AlignmentSet::with_beads(vec![b(&[0], &[1]), b(&[1], &[0])], 2, 2);
        let v = validate_alignment(&set);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].bead, Some(1));
        assert!(matches!(v[0].rule, Rule::Monotonicity(Side::Tgt)));
    }

    #[test]
    fn reuse_is_one_violation() {
        let set = AlignmentSet::with_beads(vec![b(&[0], &[0]), b(&[0], &[1])], 2, 2);
        let v = validate_alignment(&set);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(matches!(v[0].rule, Rule::IndexReuse(Side::Src)));
    }

    #[test]
    fn structural_rules() {
        let set = AlignmentSet::with_beads(
            vec![b(&[], &[]), b(&[0, 2], &[0]), b(&[3], &[5]), b(&[4, 5, 6], &[1])],
            7,
            2,
        );
        let rules: Vec<Rule> = validate_alignment(&set).into_iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::EmptyBead));
        assert!(rules.contains(&Rule::NonContiguous(Side::Src)));
        assert!(rules.contains(&Rule::OutOfRange(Side::Tgt)));
        assert!(rules.contains(&Rule::UnsupportedType(BeadType::new(3, 1))));
    }

    #[test]
    fn gold_requires_coverage() {
        let set = AlignmentSet::with_beads(vec![b(&[0], &[0]), b(&[2], &[1])], 3, 2);
        let gold = GoldAlignment::new(set);
        let v = gold.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(
            v[0].rule,
            Rule::Uncovered {
                side: Side::Src,
                index: 1
            }
        );
    }

    #[test]
    fn paragraph_ranges_follow_index_runs() {
        let mut list = SentenceList::new("d", Lang::En);
        for (s, p) in [("a", 0), ("b", 0), ("c", 2), ("d", 3), ("e", 3)] {
            list.push(s, p);
        }
        assert_eq!(list.paragraph_ranges(), vec![0..2, 2..3, 3..5]);
        assert_eq!(list.paragraph_count(), 3);
        assert_eq!(list.joined(&[3, 4]), "d e");
    }

    #[test]
    fn lang_parse() {
        assert_eq!("zh".parse::<Lang>().unwrap(), Lang::Zh);
        assert!(matches!("fr".parse::<Lang>(), Err(Error::UnknownLanguage(_))));
    }
}
