//! Two-pass sentence alignment combining a length model with IBM Model 1.
//!
//! The first pass scores beads with a Poisson model of target length in
//! tokens and keeps the 1-1 beads whose forward-backward posterior clears a
//! high threshold. Model 1 is trained on those pairs, and a second pass adds
//! the lexical likelihood ratio to every two-sided bead. Only 1-1 beads are
//! emitted; everything else is reported as unaligned.

use std::collections::HashMap;

use log::warn;
use rayon::prelude::*;

use crate::align::ibm1::{train_ibm1, TranslationTable};
use crate::error::{Error, Result};
use crate::model::{AlignmentSet, Bead, BeadType, SentenceList};
use crate::scoring::tokenize;

pub const METHOD: &str = "moore";

/// Stand-in for words seen once in the training pairs.
pub const OTHER_TOKEN: &str = "<other>";

/// Lattice moves with their prior probabilities.
pub const MOVES: [(BeadType, f64); 5] = [
    (BeadType::ONE_ONE, 0.94),
    (BeadType::ONE_ZERO, 0.01),
    (BeadType::ZERO_ONE, 0.01),
    (BeadType::TWO_ONE, 0.02),
    (BeadType::ONE_TWO, 0.02),
];

/// Smallest band half-width, in sentences, around the lattice diagonal.
const MIN_BAND: usize = 30;
/// Floor on per-word translation mass so unknown words cannot zero a bead.
const MASS_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MooreConfig {
    /// Posterior a first-pass 1-1 bead needs to become training data.
    pub theta1: f64,
    /// Posterior a final 1-1 bead needs to be emitted.
    pub theta2: f64,
    pub iterations: usize,
}

impl Default for MooreConfig {
    fn default() -> Self {
        MooreConfig {
            theta1: 0.99,
            theta2: 0.5,
            iterations: 4,
        }
    }
}

impl MooreConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta1 > 0.5 && self.theta1 < 1.0) {
            return Err(Error::InvalidParameter(format!("theta1 must lie in (0.5, 1), got {}", self.theta1)));
        }
        check_theta2(self.theta2)?;
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("EM needs at least one iteration".into()));
        }
        Ok(())
    }
}

fn check_theta2(theta2: f64) -> Result<()> {
    if theta2 > 0.0 && theta2 < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("theta2 must lie in (0, 1), got {theta2}")))
    }
}

/// Token lengths drive the Poisson model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthModel {
    /// Expected target tokens per source token.
    pub ratio: f64,
    /// Mean target sentence length, the Poisson rate for unpaired targets.
    pub tgt_mean: f64,
}

impl LengthModel {
    pub fn estimate(src: &[Vec<String>], tgt: &[Vec<String>]) -> Self {
        let s: usize = src.iter().map(Vec::len).sum();
        let t: usize = tgt.iter().map(Vec::len).sum();
        LengthModel {
            ratio: if s == 0 { 1.0 } else { t as f64 / s as f64 },
            tgt_mean: if tgt.is_empty() { 1.0 } else { t as f64 / tgt.len() as f64 },
        }
    }
}

/// Model 1 table plus the smoothed target unigram model it is compared to.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub table: TranslationTable,
    unigram: HashMap<String, u64>,
    unigram_total: u64,
}

impl Lexicon {
    /// Maps hapaxes on either side to [`OTHER_TOKEN`], then trains Model 1
    /// and the add-one target unigram model on the result.
    pub fn train(pairs: &[(Vec<String>, Vec<String>)], iterations: usize) -> Result<Self> {
        let mut src_freq: HashMap<&str, usize> = HashMap::new();
        let mut tgt_freq: HashMap<&str, usize> = HashMap::new();
        for (s, t) in pairs {
            for w in s {
                *src_freq.entry(w).or_default() += 1;
            }
            for w in t {
                *tgt_freq.entry(w).or_default() += 1;
            }
        }
        let map = |freq: &HashMap<&str, usize>, words: &[String]| -> Vec<String> {
            words
                .iter()
                .map(|w| if freq[w.as_str()] > 1 { w.clone() } else { OTHER_TOKEN.to_string() })
                .collect()
        };
        let mapped: Vec<(Vec<String>, Vec<String>)> =
            pairs.iter().map(|(s, t)| (map(&src_freq, s), map(&tgt_freq, t))).collect();
        let table = train_ibm1(&mapped, iterations)?;
        let mut unigram: HashMap<String, u64> = HashMap::new();
        let mut unigram_total = 0;
        for (_, t) in &mapped {
            for w in t {
                *unigram.entry(w.clone()).or_default() += 1;
                unigram_total += 1;
            }
        }
        Ok(Lexicon {
            table,
            unigram,
            unigram_total,
        })
    }

    /// Assembles a lexicon from an existing table, taking unigram counts from
    /// the given target sentences.
    pub fn from_table(table: TranslationTable, tgt_sentences: &[Vec<String>]) -> Self {
        let mut unigram: HashMap<String, u64> = HashMap::new();
        let mut unigram_total = 0;
        for s in tgt_sentences {
            for w in s {
                let key = if table.tgt_id(w).is_some() { w.as_str() } else { OTHER_TOKEN };
                *unigram.entry(key.to_string()).or_default() += 1;
                unigram_total += 1;
            }
        }
        Lexicon {
            table,
            unigram,
            unigram_total,
        }
    }

    fn ln_unigram(&self, w: &str) -> f64 {
        let key = if self.table.tgt_id(w).is_some() { w } else { OTHER_TOKEN };
        let c = self.unigram.get(key).copied().unwrap_or(0);
        let denom = self.unigram_total + self.unigram.len() as u64 + 1;
        ((c + 1) as f64 / denom as f64).ln()
    }

    fn src_id(&self, w: &str) -> Option<u32> {
        self.table.src_id(w).or_else(|| self.table.src_id(OTHER_TOKEN))
    }

    fn tgt_id(&self, w: &str) -> Option<u32> {
        self.table.tgt_id(w).or_else(|| self.table.tgt_id(OTHER_TOKEN))
    }

    /// True when neither side shares a single word with the table.
    fn disjoint_from(&self, src: &[Vec<String>], tgt: &[Vec<String>]) -> bool {
        let src_hit = src.iter().flatten().any(|w| self.table.src_id(w).is_some());
        let tgt_hit = tgt.iter().flatten().any(|w| self.table.tgt_id(w).is_some());
        !src_hit && !tgt_hit
    }
}

/// Length ratio and optional lexicon shared by every document of a corpus.
#[derive(Debug, Clone)]
pub struct MooreModel {
    pub length: LengthModel,
    pub lexicon: Option<Lexicon>,
}

/// Posterior of every bead in the lattice, indexed by the cell the bead
/// starts at and its move.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePosteriors {
    pub src_len: usize,
    pub tgt_len: usize,
    post: Vec<[f64; 5]>,
}

impl LatticePosteriors {
    fn at(&self, i: usize, j: usize) -> usize {
        i * (self.tgt_len + 1) + j
    }

    /// Posterior of the bead of type `ty` that starts at source `i`, target `j`.
    pub fn get(&self, i: usize, j: usize, ty: BeadType) -> f64 {
        if i > self.src_len || j > self.tgt_len {
            return 0.0;
        }
        MOVES
            .iter()
            .position(|(t, _)| *t == ty)
            .map_or(0.0, |k| self.post[self.at(i, j)][k])
    }

    /// Every 1-1 bead with nonzero posterior as `(src, tgt, posterior)`.
    pub fn one_to_one(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.src_len {
            for j in 0..self.tgt_len {
                let p = self.post[self.at(i, j)][0];
                if p > 0.0 {
                    out.push((i, j, p));
                }
            }
        }
        out
    }

    /// Probability that source sentence `i` is left unaligned.
    pub fn src_unaligned(&self, i: usize) -> f64 {
        (0..=self.tgt_len).map(|j| self.post[self.at(i, j)][1]).sum::<f64>().min(1.0)
    }

    /// Probability that target sentence `j` is left unaligned.
    pub fn tgt_unaligned(&self, j: usize) -> f64 {
        (0..=self.src_len).map(|i| self.post[self.at(i, j)][2]).sum::<f64>().min(1.0)
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn ln_factorials(max: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(max + 1);
    v.push(0.0);
    for k in 1..=max {
        v.push(v[k - 1] + (k as f64).ln());
    }
    v
}

fn ln_poisson(k: usize, rate: f64, ln_fact: &[f64]) -> f64 {
    let rate = rate.max(1e-3);
    k as f64 * rate.ln() - rate - ln_fact[k]
}

struct Band {
    n: usize,
    m: usize,
    width: usize,
}

impl Band {
    fn new(n: usize, m: usize) -> Self {
        Band {
            n,
            m,
            width: MIN_BAND.max(n.max(m) / 5),
        }
    }

    fn contains(&self, i: usize, j: usize) -> bool {
        if self.n == 0 || self.m == 0 {
            return true;
        }
        (j * self.n).abs_diff(i * self.m) <= self.width * self.n
    }
}

/// Forward-backward over the lattice. `score(k, i, j)` is the log
/// probability of move `k` starting at cell `(i, j)`.
fn forward_backward<F>(n: usize, m: usize, score: F) -> LatticePosteriors
where
    F: Fn(usize, usize, usize) -> f64,
{
    let band = Band::new(n, m);
    let cols = m + 1;
    let cells = (n + 1) * cols;
    let ninf = f64::NEG_INFINITY;
    let mut sc = vec![[ninf; 5]; cells];
    for i in 0..=n {
        for j in 0..=m {
            if !band.contains(i, j) {
                continue;
            }
            for (k, (ty, _)) in MOVES.iter().enumerate() {
                let (ei, ej) = (i + ty.src, j + ty.tgt);
                if ei <= n && ej <= m && band.contains(ei, ej) {
                    sc[i * cols + j][k] = score(k, i, j);
                }
            }
        }
    }
    let mut alpha = vec![ninf; cells];
    alpha[0] = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            let a = alpha[i * cols + j];
            if a == ninf {
                continue;
            }
            for (k, (ty, _)) in MOVES.iter().enumerate() {
                let s = sc[i * cols + j][k];
                if s != ninf {
                    let e = (i + ty.src) * cols + j + ty.tgt;
                    alpha[e] = ln_add(alpha[e], a + s);
                }
            }
        }
    }
    let mut beta = vec![ninf; cells];
    beta[cells - 1] = 0.0;
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            let mut b = beta[i * cols + j];
            for (k, (ty, _)) in MOVES.iter().enumerate() {
                let s = sc[i * cols + j][k];
                if s != ninf {
                    b = ln_add(b, s + beta[(i + ty.src) * cols + j + ty.tgt]);
                }
            }
            beta[i * cols + j] = b;
        }
    }
    let z = alpha[cells - 1];
    let mut post = vec![[0.0; 5]; cells];
    if z.is_finite() {
        for i in 0..=n {
            for j in 0..=m {
                let c = i * cols + j;
                for (k, (ty, _)) in MOVES.iter().enumerate() {
                    let s = sc[c][k];
                    if s != ninf && alpha[c] != ninf {
                        let e = (i + ty.src) * cols + j + ty.tgt;
                        post[c][k] = (alpha[c] + s + beta[e] - z).exp().clamp(0.0, 1.0);
                    }
                }
            }
        }
    }
    LatticePosteriors {
        src_len: n,
        tgt_len: m,
        post,
    }
}

/// Log probability of a bead under the length model alone.
fn length_score(k: usize, ls: usize, lt: usize, model: &LengthModel, ln_fact: &[f64]) -> f64 {
    let (ty, prior) = MOVES[k];
    let mut s = prior.ln();
    if ty.src > 0 && ty.tgt > 0 {
        s += ln_poisson(lt, ls as f64 * model.ratio, ln_fact);
        if ty.tgt == 2 {
            // uniform split of the target tokens between the two sentences
            s -= ((lt + 1) as f64).ln();
        }
    } else if ty.tgt > 0 {
        s += ln_poisson(lt, model.tgt_mean, ln_fact);
    }
    s
}

fn span_len(lens: &[usize], start: usize, k: usize) -> usize {
    lens[start..start + k].iter().sum()
}

fn run_length_only(src: &[Vec<String>], tgt: &[Vec<String>], model: &LengthModel) -> LatticePosteriors {
    let sl: Vec<usize> = src.iter().map(Vec::len).collect();
    let tl: Vec<usize> = tgt.iter().map(Vec::len).collect();
    let ln_fact = ln_factorials(2 * tl.iter().max().copied().unwrap_or(0) + 1);
    forward_backward(src.len(), tgt.len(), |k, i, j| {
        let ty = MOVES[k].0;
        length_score(k, span_len(&sl, i, ty.src), span_len(&tl, j, ty.tgt), model, &ln_fact)
    })
}

/// Per-sentence word ids and, per target sentence, the null-word mass and
/// log unigram probability of each word.
struct Encoded {
    src: Vec<Vec<Option<u32>>>,
    tgt: Vec<Vec<Option<u32>>>,
    null_mass: Vec<Vec<f64>>,
    ln_u: Vec<f64>,
}

fn encode(lex: &Lexicon, src: &[Vec<String>], tgt: &[Vec<String>]) -> Encoded {
    let table = &lex.table;
    let tgt_ids: Vec<Vec<Option<u32>>> =
        tgt.iter().map(|s| s.iter().map(|w| lex.tgt_id(w)).collect()).collect();
    let null_mass = tgt_ids
        .iter()
        .map(|s| s.iter().map(|id| id.map_or(0.0, |t| table.prob_ids(table.null_id(), t))).collect())
        .collect();
    Encoded {
        src: src.iter().map(|s| s.iter().map(|w| lex.src_id(w)).collect()).collect(),
        tgt: tgt_ids,
        null_mass,
        ln_u: tgt.iter().map(|s| s.iter().map(|w| lex.ln_unigram(w)).sum()).collect(),
    }
}

fn run_lexical(
    src: &[Vec<String>],
    tgt: &[Vec<String>],
    model: &LengthModel,
    lex: &Lexicon,
) -> LatticePosteriors {
    let (n, m) = (src.len(), tgt.len());
    let sl: Vec<usize> = src.iter().map(Vec::len).collect();
    let tl: Vec<usize> = tgt.iter().map(Vec::len).collect();
    let ln_fact = ln_factorials(2 * tl.iter().max().copied().unwrap_or(0) + 1);
    let enc = encode(lex, src, tgt);
    let band = Band::new(n, m);
    let table = &lex.table;

    // mass[a][b][j] = sum over words of source sentence a of t(word j of b | .)
    // for every sentence pair that some two-sided bead can contain
    let mut mass: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
    for a in 0..n {
        for b in 0..m {
            let near = (a.saturating_sub(1)..=a + 1).any(|x| (b.saturating_sub(1)..=b + 1).any(|y| band.contains(x, y)));
            if !near {
                continue;
            }
            let v = enc.tgt[b]
                .iter()
                .map(|tid| {
                    tid.map_or(0.0, |t| enc.src[a].iter().flatten().map(|&s| table.prob_ids(s, t)).sum())
                })
                .collect();
            mass.insert((a, b), v);
        }
    }
    let lexical = |i: usize, j: usize, ty: BeadType| -> f64 {
        let src_words: usize = sl[i..i + ty.src].iter().sum();
        let mut s = 0.0;
        let mut words = 0usize;
        for b in j..j + ty.tgt {
            for (w, null) in enc.null_mass[b].iter().enumerate() {
                let mut total = *null;
                for a in i..i + ty.src {
                    total += mass.get(&(a, b)).map_or(0.0, |v| v[w]);
                }
                s += total.max(MASS_FLOOR).ln();
            }
            words += tl[b];
            s -= enc.ln_u[b];
        }
        s - words as f64 * ((src_words + 1) as f64).ln()
    };
    forward_backward(n, m, |k, i, j| {
        let ty = MOVES[k].0;
        let base = length_score(k, span_len(&sl, i, ty.src), span_len(&tl, j, ty.tgt), model, &ln_fact);
        if ty.src > 0 && ty.tgt > 0 {
            base + lexical(i, j, ty)
        } else {
            base
        }
    })
}

/// Lowercased tokens of every sentence, the unit the length and lexical
/// models count in.
pub fn sentence_tokens(list: &SentenceList) -> Vec<Vec<String>> {
    list.sentences
        .iter()
        .map(|s| tokenize(s, list.lang).into_iter().map(|t| t.to_lowercase()).collect())
        .collect()
}

fn confident(post: &LatticePosteriors, theta1: f64) -> Vec<(usize, usize)> {
    post.one_to_one()
        .into_iter()
        .filter(|&(_, _, p)| p >= theta1)
        .map(|(i, j, _)| (i, j))
        .collect()
}

/// Length-only pass with the length ratio estimated from this pair alone.
/// Returns the posteriors and the 1-1 beads at or above `theta1`.
pub fn length_pass(
    src: &SentenceList,
    tgt: &SentenceList,
    theta1: f64,
) -> Result<(LatticePosteriors, Vec<(usize, usize)>)> {
    let st = sentence_tokens(src);
    let tt = sentence_tokens(tgt);
    let model = LengthModel::estimate(&st, &tt);
    length_pass_tokens(&st, &tt, &model, theta1)
}

/// Length-only pass on pre-tokenized sentences with a given model.
pub fn length_pass_tokens(
    src: &[Vec<String>],
    tgt: &[Vec<String>],
    model: &LengthModel,
    theta1: f64,
) -> Result<(LatticePosteriors, Vec<(usize, usize)>)> {
    if !(theta1 > 0.5 && theta1 < 1.0) {
        return Err(Error::InvalidParameter(format!("theta1 must lie in (0.5, 1), got {theta1}")));
    }
    let post = run_length_only(src, tgt, model);
    let pairs = confident(&post, theta1);
    Ok((post, pairs))
}

/// Posteriors of the final pass: lexical when the model has a lexicon that
/// overlaps the input, length-only otherwise.
pub fn final_posteriors(src: &[Vec<String>], tgt: &[Vec<String>], model: &MooreModel) -> LatticePosteriors {
    match &model.lexicon {
        Some(lex) if !lex.disjoint_from(src, tgt) => run_lexical(src, tgt, &model.length, lex),
        Some(_) => {
            warn!("translation table shares no vocabulary with the input; aligning on length only");
            run_length_only(src, tgt, &model.length)
        }
        None => run_length_only(src, tgt, &model.length),
    }
}

/// Picks 1-1 beads at or above `theta2`, most probable first, skipping any
/// that would reuse an index or cross an accepted bead, then fills the
/// remaining sentences with 1-0 and 0-1 beads.
pub fn extract_alignment(post: &LatticePosteriors, theta2: f64) -> AlignmentSet {
    let mut cands: Vec<(usize, usize, f64)> =
        post.one_to_one().into_iter().filter(|&(_, _, p)| p >= theta2).collect();
    cands.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut chosen: Vec<(usize, usize, f64)> = Vec::new();
    for c in cands {
        let clash = chosen
            .iter()
            .any(|&(i, j, _)| i == c.0 || j == c.1 || ((i < c.0) != (j < c.1)));
        if !clash {
            chosen.push(c);
        }
    }
    chosen.sort_by_key(|&(i, j, _)| (i, j));

    let (n, m) = (post.src_len, post.tgt_len);
    let mut beads = Vec::new();
    let (mut si, mut tj) = (0, 0);
    let fill = |beads: &mut Vec<Bead>, s: std::ops::Range<usize>, t: std::ops::Range<usize>| {
        for i in s {
            beads.push(Bead::new(vec![i], vec![], Some(post.src_unaligned(i)), METHOD));
        }
        for j in t {
            beads.push(Bead::new(vec![], vec![j], Some(post.tgt_unaligned(j)), METHOD));
        }
    };
    for (i, j, p) in chosen {
        fill(&mut beads, si..i, tj..j);
        beads.push(Bead::one_to_one(i, j, p, METHOD));
        si = i + 1;
        tj = j + 1;
    }
    fill(&mut beads, si..n, tj..m);
    AlignmentSet::with_beads(beads, n, m)
}

/// Aligns one document pair with a trained model.
pub fn moore_align(src: &SentenceList, tgt: &SentenceList, model: &MooreModel, theta2: f64) -> Result<AlignmentSet> {
    check_theta2(theta2)?;
    let post = final_posteriors(&sentence_tokens(src), &sentence_tokens(tgt), model);
    Ok(extract_alignment(&post, theta2))
}

/// Runs both passes over a corpus of document pairs: one length ratio and one
/// lexicon for the whole corpus. Returns the alignments in input order and
/// the model that produced them.
pub fn moore_align_corpus(
    docs: &[(SentenceList, SentenceList)],
    cfg: &MooreConfig,
) -> Result<(Vec<AlignmentSet>, MooreModel)> {
    cfg.validate()?;
    let tokens: Vec<(Vec<Vec<String>>, Vec<Vec<String>>)> =
        docs.par_iter().map(|(s, t)| (sentence_tokens(s), sentence_tokens(t))).collect();
    let all_src: Vec<Vec<String>> = tokens.iter().flat_map(|(s, _)| s.iter().cloned()).collect();
    let all_tgt: Vec<Vec<String>> = tokens.iter().flat_map(|(_, t)| t.iter().cloned()).collect();
    let length = LengthModel::estimate(&all_src, &all_tgt);

    let first: Vec<Vec<(usize, usize)>> = tokens
        .par_iter()
        .map(|(s, t)| length_pass_tokens(s, t, &length, cfg.theta1).map(|(_, c)| c))
        .collect::<Result<_>>()?;
    let mut training = Vec::new();
    for ((s, t), pairs) in tokens.iter().zip(&first) {
        for &(i, j) in pairs {
            training.push((s[i].clone(), t[j].clone()));
        }
    }
    let lexicon = if training.is_empty() {
        warn!("length pass found no confident sentence pairs; aligning on length only");
        None
    } else {
        Some(Lexicon::train(&training, cfg.iterations)?)
    };
    let model = MooreModel { length, lexicon };
    let sets = tokens
        .par_iter()
        .map(|(s, t)| extract_alignment(&final_posteriors(s, t, &model), cfg.theta2))
        .collect();
    Ok((sets, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_alignment, Lang};

    fn list(lang: Lang, sents: &[&str]) -> SentenceList {
        SentenceList::from_sentences("d", lang, sents.iter().copied())
    }

    #[test]
    fn identical_sides_are_confident_on_the_diagonal() {
        let sents = [
            "the first sentence is here .",
            "a second one that is a good deal longer than the first one .",
            "short .",
            "and the fourth sentence has a medium length .",
            "finally the fifth sentence closes the document at last .",
        ];
        let s = list(Lang::En, &sents);
        let (post, pairs) = length_pass(&s, &s, 0.99).unwrap();
        assert_eq!(pairs, (0..5).map(|i| (i, i)).collect::<Vec<_>>());
        for i in 0..5 {
            assert!(post.get(i, i, BeadType::ONE_ONE) >= 0.99);
        }
    }

    #[test]
    fn empty_side_has_no_confident_pairs() {
        let s = list(Lang::En, &["one .", "two ."]);
        let e = list(Lang::En, &[]);
        assert!(length_pass(&s, &e, 0.99).unwrap().1.is_empty());
        assert!(length_pass(&e, &s, 0.99).unwrap().1.is_empty());
    }

    #[test]
    fn posteriors_in_unit_interval() {
        let s = list(Lang::En, &["a b c", "d e", "f g h i j", "k"]);
        let t = list(Lang::En, &["a b", "c d e f", "g", "h i j k l", "m n"]);
        let (post, _) = length_pass(&s, &t, 0.9).unwrap();
        for i in 0..=4 {
            for j in 0..=5 {
                for (ty, _) in MOVES {
                    let p = post.get(i, j, ty);
                    assert!((0.0..=1.0).contains(&p));
                }
            }
        }
    }

    #[test]
    fn threshold_validation() {
        let s = list(Lang::En, &["a"]);
        assert!(length_pass(&s, &s, 0.5).is_err());
        assert!(length_pass(&s, &s, 1.0).is_err());
        let model = MooreModel {
            length: LengthModel {
                ratio: 1.0,
                tgt_mean: 1.0,
            },
            lexicon: None,
        };
        assert!(moore_align(&s, &s, &model, 0.0).is_err());
    }

    #[test]
    fn output_is_valid_partition() {
        let s = list(Lang::En, &["a b c", "d e", "f g h i j", "k"]);
        let t = list(Lang::En, &["a b", "c d e f", "g", "h i j k l", "m n"]);
        let (sets, _) = moore_align_corpus(&[(s, t)], &MooreConfig::default()).unwrap();
        assert!(validate_alignment(&sets[0]).is_empty());
        let covered: usize = sets[0].beads.iter().map(|b| b.src.len()).sum();
        assert_eq!(covered, 4);
    }

    #[test]
    fn disjoint_table_falls_back_to_length() {
        let s = list(Lang::En, &["a b c", "d e f g"]);
        let t = list(Lang::En, &["x y z", "w v u t"]);
        let table = TranslationTable::from_entries([("p", "q", 1.0)]).unwrap();
        let lex = Lexicon::from_table(table, &[]);
        let length = LengthModel {
            ratio: 1.0,
            tgt_mean: 3.5,
        };
        let with = MooreModel {
            length,
            lexicon: Some(lex),
        };
        let without = MooreModel { length, lexicon: None };
        assert_eq!(
            moore_align(&s, &t, &with, 0.5).unwrap(),
            moore_align(&s, &t, &without, 0.5).unwrap()
        );
    }

    #[test]
    fn ln_add_matches_direct_sum() {
        let v = ln_add(0.3f64.ln(), 0.2f64.ln());
        assert!((v - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(ln_add(f64::NEG_INFINITY, 1.0), 1.0);
    }
}
