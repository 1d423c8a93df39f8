//! Unsupervised sentence splitting in the style of Punkt.
//!
//! Training counts whitespace tokens over a corpus and learns three things
//! with log-likelihood ratio tests: which period-final word types are
//! abbreviations, which types frequently start sentences, and which
//! number/initial + word pairs are collocations that a period must not
//! split. Segmentation then breaks after every period-final token unless the
//! learned statistics say otherwise.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use super::{cut_at_spaces, AbbrevList};
use crate::error::{Error, Result};
use crate::model::{Document, Lang};

/// Type standing in for every number.
pub const NUMBER_TYPE: &str = "##number##";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PunktParams {
    pub abbrev_threshold: f64,
    pub starter_threshold: f64,
    pub colloc_threshold: f64,
}

impl Default for PunktParams {
    fn default() -> Self {
        PunktParams {
            abbrev_threshold: 0.3,
            starter_threshold: 30.0,
            colloc_threshold: 7.88,
        }
    }
}

impl PunktParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("abbrev_threshold", self.abbrev_threshold),
            ("starter_threshold", self.starter_threshold),
            ("colloc_threshold", self.colloc_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Learned types with the score that admitted them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PunktModel {
    pub abbreviations: BTreeMap<String, f64>,
    pub sentence_starters: BTreeMap<String, f64>,
    pub collocations: BTreeMap<(String, String), f64>,
    pub params: PunktParams,
}

impl PunktModel {
    pub fn is_empty(&self) -> bool {
        self.abbreviations.is_empty() && self.sentence_starters.is_empty() && self.collocations.is_empty()
    }

    /// Learned abbreviations as a plain list.
    pub fn abbrev_list(&self) -> AbbrevList {
        AbbrevList::new(self.abbreviations.keys())
    }

    /// Tab-separated records: `param<TAB>name<TAB>value`, then
    /// `abbrev|starter<TAB>type<TAB>score` and
    /// `colloc<TAB>type<TAB>type<TAB>score`.
    pub fn to_tsv(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let _ = writeln!(out, "param\tabbrev_threshold\t{}", p.abbrev_threshold);
        let _ = writeln!(out, "param\tstarter_threshold\t{}", p.starter_threshold);
        let _ = writeln!(out, "param\tcolloc_threshold\t{}", p.colloc_threshold);
        for (t, s) in &self.abbreviations {
            let _ = writeln!(out, "abbrev\t{t}\t{s}");
        }
        for (t, s) in &self.sentence_starters {
            let _ = writeln!(out, "starter\t{t}\t{s}");
        }
        for ((a, b), s) in &self.collocations {
            let _ = writeln!(out, "colloc\t{a}\t{b}\t{s}");
        }
        out
    }

    pub fn from_tsv(text: &str, path: &Path) -> Result<Self> {
        let mut model = PunktModel::default();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let bad = || Error::parse(path, n + 1, "expected `kind<TAB>token[<TAB>token2]<TAB>score`");
            let score: f64 = f.last().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            match (f[0], f.len()) {
                ("param", 3) => match f[1] {
                    "abbrev_threshold" => model.params.abbrev_threshold = score,
                    "starter_threshold" => model.params.starter_threshold = score,
                    "colloc_threshold" => model.params.colloc_threshold = score,
                    other => return Err(Error::parse(path, n + 1, format!("unknown parameter `{other}`"))),
                },
                ("abbrev", 3) => {
                    model.abbreviations.insert(f[1].to_string(), score);
                }
                ("starter", 3) => {
                    model.sentence_starters.insert(f[1].to_string(), score);
                }
                ("colloc", 4) => {
                    model.collocations.insert((f[1].to_string(), f[2].to_string()), score);
                }
                _ => return Err(bad()),
            }
        }
        model.params.validate()?;
        Ok(model)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PunktModel::from_tsv(&text, path)
    }
}

/// One whitespace-delimited token, classified.
#[derive(Debug, Clone, PartialEq)]
struct Token {
    /// Lowercased text without surrounding brackets/quotes and without the
    /// final period; numbers collapse to [`NUMBER_TYPE`].
    ty: String,
    period_final: bool,
    ellipsis: bool,
    /// Ends in `?` or `!`.
    strong_end: bool,
    /// Byte range in the source text.
    start: usize,
    end: usize,
}

impl Token {
    fn has_word_char(&self) -> bool {
        self.ty.chars().any(char::is_alphanumeric)
    }

    fn is_number(&self) -> bool {
        self.ty == NUMBER_TYPE
    }

    fn is_initial(&self) -> bool {
        self.period_final && {
            let mut c = self.ty.chars();
            matches!((c.next(), c.next()), (Some(ch), None) if ch.is_alphabetic())
        }
    }
}

fn number_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^-?[.,]?\d[\d,.\-]*$").expect("valid number pattern"))
}

const OPENERS: &[char] = &['(', '[', '"', '\'', '“', '‘'];
const CLOSERS: &[char] = &[')', ']', '"', '\'', '”', '’', ',', ';', ':'];

fn classify(raw: &str, start: usize) -> Token {
    let core = raw.trim_start_matches(OPENERS);
    let stripped = core.trim_end_matches(CLOSERS);
    let strong_end = stripped.ends_with(['?', '!']);
    let ellipsis = stripped.ends_with("..") || stripped.ends_with('…');
    let period_final = !ellipsis && stripped.ends_with('.');
    let base = stripped.trim_end_matches(['.', '?', '!']);
    let base = base.trim_end_matches(CLOSERS).to_lowercase();
    let ty = if number_re().is_match(&base) { NUMBER_TYPE.to_string() } else { base };
    Token {
        ty,
        period_final,
        ellipsis,
        strong_end,
        start,
        end: start + raw.len(),
    }
}

fn tokens(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(classify(&text[s..i], s));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(classify(&text[s..], s));
    }
    out
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Log-likelihood ratio that a type is an abbreviation: the period follows
/// it almost always (p = 0.99) versus at the corpus base rate.
pub fn dunning_log_likelihood(count_a: f64, count_b: f64, count_ab: f64, n: f64) -> f64 {
    let p1 = count_b / n;
    let p2 = 0.99;
    let null = xlogy(count_ab, p1) + xlogy(count_a - count_ab, 1.0 - p1);
    let alt = xlogy(count_ab, p2) + xlogy(count_a - count_ab, 1.0 - p2);
    -2.0 * (null - alt)
}

/// Collocation log-likelihood ratio of two events.
pub fn col_log_likelihood(count_a: f64, count_b: f64, count_ab: f64, n: f64) -> f64 {
    let p = count_b / n;
    let p1 = count_ab / count_a;
    let p2 = if n > count_a { (count_b - count_ab) / (n - count_a) } else { 0.0 };
    let s1 = xlogy(count_ab, p) + xlogy(count_a - count_ab, 1.0 - p);
    let s2 = xlogy(count_b - count_ab, p) + xlogy(n - count_a - count_b + count_ab, 1.0 - p);
    let s3 = if count_a == count_ab {
        0.0
    } else {
        xlogy(count_ab, p1) + xlogy(count_a - count_ab, 1.0 - p1)
    };
    let s4 = if count_b == count_ab {
        0.0
    } else {
        xlogy(count_b - count_ab, p2) + xlogy(n - count_a - count_b + count_ab, 1.0 - p2)
    };
    -2.0 * (s1 + s2 - s3 - s4)
}

/// Abbreviation score of a type seen `with` times before a period and
/// `without` times otherwise.
pub fn abbreviation_score(ty: &str, with: u64, without: u64, period_tokens: u64, total: u64) -> f64 {
    let num_periods = ty.matches('.').count() as f64 + 1.0;
    let num_nonperiods = ty.chars().count() as f64 - num_periods + 1.0;
    let ll = dunning_log_likelihood((with + without) as f64, period_tokens as f64, with as f64, total as f64);
    ll * (-num_nonperiods).exp() * num_periods * num_nonperiods.powf(-(without as f64))
}

#[derive(Default)]
struct Counts {
    with_period: HashMap<String, u64>,
    without_period: HashMap<String, u64>,
    period_tokens: u64,
    total: u64,
}

impl Counts {
    fn type_count(&self, ty: &str) -> u64 {
        self.with_period.get(ty).copied().unwrap_or(0) + self.without_period.get(ty).copied().unwrap_or(0)
    }
}

fn sorted<K: Ord + Clone, V: Copy>(m: &HashMap<K, V>) -> Vec<(K, V)> {
    let mut v: Vec<(K, V)> = m.iter().map(|(k, v)| (k.clone(), *v)).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// Learns a model from the English documents of `corpus` with default
/// thresholds.
pub fn train_punkt(corpus: &[Document]) -> PunktModel {
    train_punkt_with(corpus, PunktParams::default())
}

pub fn train_punkt_with(corpus: &[Document], params: PunktParams) -> PunktModel {
    let streams: Vec<Vec<Token>> = corpus
        .iter()
        .filter(|d| d.lang() == Lang::En)
        .map(|d| d.paragraphs.iter().flat_map(|p| tokens(p)).collect())
        .collect();

    let mut counts = Counts::default();
    for t in streams.iter().flatten() {
        counts.total += 1;
        if t.period_final {
            counts.period_tokens += 1;
            *counts.with_period.entry(t.ty.clone()).or_default() += 1;
        } else {
            *counts.without_period.entry(t.ty.clone()).or_default() += 1;
        }
    }
    let mut model = PunktModel {
        params,
        ..PunktModel::default()
    };
    if counts.total == 0 {
        return model;
    }

    for (ty, with) in sorted(&counts.with_period) {
        if ty == NUMBER_TYPE || !ty.chars().any(char::is_alphabetic) {
            continue;
        }
        let without = counts.without_period.get(&ty).copied().unwrap_or(0);
        let score = abbreviation_score(&ty, with, without, counts.period_tokens, counts.total);
        if score >= params.abbrev_threshold {
            model.abbreviations.insert(ty, score);
        }
    }

    // sentence breaks under the learned abbreviations, and what follows them
    let mut breaks = 0u64;
    let mut at_break: HashMap<String, u64> = HashMap::new();
    let mut colloc: HashMap<(String, String), u64> = HashMap::new();
    for stream in &streams {
        for (k, t) in stream.iter().enumerate() {
            let is_break = t.strong_end || (t.period_final && !model.abbreviations.contains_key(&t.ty));
            if !is_break {
                continue;
            }
            breaks += 1;
            if let Some(next) = stream.get(k + 1) {
                if next.has_word_char() {
                    *at_break.entry(next.ty.clone()).or_default() += 1;
                    if t.period_final && (t.is_number() || t.is_initial()) && t.has_word_char() {
                        *colloc.entry((t.ty.clone(), next.ty.clone())).or_default() += 1;
                    }
                }
            }
        }
    }
    let n = counts.total as f64;
    if breaks > 0 {
        for (ty, ss) in sorted(&at_break) {
            let tc = counts.type_count(&ty);
            if tc < ss {
                continue;
            }
            let ll = col_log_likelihood(breaks as f64, tc as f64, ss as f64, n);
            if ll >= params.starter_threshold && n / breaks as f64 > tc as f64 / ss as f64 {
                model.sentence_starters.insert(ty, ll);
            }
        }
    }
    for ((a, b), cc) in sorted(&colloc) {
        if cc <= 1 {
            continue;
        }
        let (ca, cb) = (counts.type_count(&a) as f64, counts.type_count(&b) as f64);
        let ll = col_log_likelihood(ca, cb, cc as f64, n);
        if ll >= params.colloc_threshold && n / ca > cb / cc as f64 {
            model.collocations.insert((a, b), ll);
        }
    }
    model
}

/// Splits with a learned model.
///
/// `?` and `!` always end a sentence. A period-final token ends one unless
/// it forms a learned collocation with the next token, or it is a learned
/// abbreviation or a single-letter initial and the next token is not a
/// learned sentence starter. Citation numbers glued to the period are not
/// recognized, so `reported.12-14 To` stays one sentence.
pub fn segment_punkt(paragraph: &str, model: &PunktModel) -> Vec<String> {
    let text = paragraph.trim();
    let toks = tokens(text);
    let mut runs = Vec::new();
    for pair in toks.windows(2) {
        let (t, next) = (&pair[0], &pair[1]);
        let split = if t.strong_end {
            true
        } else if t.period_final {
            if model.collocations.contains_key(&(t.ty.clone(), next.ty.clone())) {
                false
            } else if model.abbreviations.contains_key(&t.ty) || t.is_initial() {
                model.sentence_starters.contains_key(&next.ty)
            } else {
                true
            }
        } else {
            false
        };
        if split {
            runs.push((t.end, next.start));
        }
    }
    cut_at_spaces(text, &runs)
}
