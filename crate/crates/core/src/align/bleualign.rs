//! Alignment through a machine translation of the source.
//!
//! Each translated source sentence is scored against each target sentence
//! with sentence-level BLEU. The best monotone chain of scores gives anchor
//! pairs; anchors may absorb one neighbouring sentence when that raises
//! their BLEU, and the sentences left between anchors are aligned by
//! sentence length.

use crate::align::gale_church::{align_range, LengthParams};
use crate::error::{Error, Result};
use crate::model::{AlignmentSet, Bead, BeadType, SentenceList};
use crate::scoring::{sentence_bleu, tokenize, BleuConfig};

pub const METHOD: &str = "bleualign";

#[derive(Debug, Clone, PartialEq)]
pub struct BleualignConfig {
    pub bleu: BleuConfig,
    /// Cells must score strictly above this to become anchors.
    pub min_score: f64,
    /// Length model for the gaps between anchors.
    pub length: LengthParams,
}

impl Default for BleualignConfig {
    fn default() -> Self {
        BleualignConfig {
            bleu: BleuConfig::default(),
            min_score: 0.0,
            length: LengthParams::default(),
        }
    }
}

impl BleualignConfig {
    pub fn validate(&self) -> Result<()> {
        self.bleu.validate()?;
        self.length.validate()?;
        if !(0.0..1.0).contains(&self.min_score) {
            return Err(Error::InvalidParameter(format!("min_score must lie in [0, 1), got {}", self.min_score)));
        }
        Ok(())
    }
}

/// BLEU of every (translated source, target) sentence pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl ScoreMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ScoreMatrix { rows, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

fn tokens(list: &SentenceList, lang_of: &SentenceList) -> Vec<Vec<String>> {
    list.sentences.iter().map(|s| tokenize(s, lang_of.lang)).collect()
}

/// Scores `src_translation` (already in the target language) against `tgt`.
pub fn score_matrix(src_translation: &SentenceList, tgt: &SentenceList, cfg: &BleuConfig) -> Result<ScoreMatrix> {
    cfg.validate()?;
    let hyp = tokens(src_translation, tgt);
    let refs = tokens(tgt, tgt);
    Ok(matrix_from_tokens(&hyp, &refs, cfg))
}

fn matrix_from_tokens(hyp: &[Vec<String>], refs: &[Vec<String>], cfg: &BleuConfig) -> ScoreMatrix {
    ScoreMatrix::from_fn(hyp.len(), refs.len(), |i, j| sentence_bleu(&hyp[i], &refs[j], cfg))
}

#[derive(Debug, Clone, Copy)]
struct Chain {
    total: f64,
    /// Summed distance of the chain's cells from the main diagonal, in
    /// units of `1 / (rows * cols)`.
    deviation: u64,
    start: (usize, usize),
}

impl Chain {
    fn better_than(&self, other: &Chain) -> bool {
        if self.total != other.total {
            return self.total > other.total;
        }
        if self.deviation != other.deviation {
            return self.deviation < other.deviation;
        }
        self.start < other.start
    }
}

/// Highest-scoring chain of cells, strictly increasing in both coordinates,
/// using only cells scoring above `min_score`. Equal totals prefer the chain
/// nearer the main diagonal, then the one starting at the smaller cell.
pub fn find_anchors(m: &ScoreMatrix, min_score: f64) -> Vec<(usize, usize)> {
    let (r, c) = (m.rows, m.cols);
    if r == 0 || c == 0 {
        return Vec::new();
    }
    let dev = |i: usize, j: usize| ((i * c) as u64).abs_diff((j * r) as u64);
    // chain[i][j]: best chain starting exactly at (i, j) and its successor;
    // region[i][j]: best chain starting anywhere in rows >= i, cols >= j
    let w = c + 1;
    let mut chain: Vec<Option<(Chain, Option<(usize, usize)>)>> = vec![None; (r + 1) * w];
    let mut region: Vec<Option<Chain>> = vec![None; (r + 1) * w];
    for i in (0..r).rev() {
        for j in (0..c).rev() {
            let s = m.get(i, j);
            if s > min_score {
                let tail = region[(i + 1) * w + j + 1];
                let here = Chain {
                    total: s + tail.map_or(0.0, |t| t.total),
                    deviation: dev(i, j) + tail.map_or(0, |t| t.deviation),
                    start: (i, j),
                };
                chain[i * w + j] = Some((here, tail.map(|t| t.start)));
            }
            let mut best: Option<Chain> = chain[i * w + j].map(|(ch, _)| ch);
            for cand in [region[(i + 1) * w + j], region[i * w + j + 1]].into_iter().flatten() {
                if best.is_none_or(|b| cand.better_than(&b)) {
                    best = Some(cand);
                }
            }
            region[i * w + j] = best;
        }
    }
    let mut out = Vec::new();
    let mut cur = region[0].map(|ch| ch.start);
    while let Some((i, j)) = cur {
        out.push((i, j));
        cur = chain[i * w + j].and_then(|(_, next)| next);
    }
    out
}

fn concat(parts: &[&Vec<String>]) -> Vec<String> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

/// One direction of the method: `mt` translates `src` into the language of
/// `tgt`.
fn align_one_way(
    src: &SentenceList,
    tgt: &SentenceList,
    mt: &SentenceList,
    cfg: &BleualignConfig,
) -> Result<AlignmentSet> {
    if mt.len() != src.len() {
        return Err(Error::Mismatch(format!(
            "source has {} sentences but its translation has {}",
            src.len(),
            mt.len()
        )));
    }
    let hyp = tokens(mt, tgt);
    let refs = tokens(tgt, tgt);
    let matrix = matrix_from_tokens(&hyp, &refs, &cfg.bleu);
    let anchors = find_anchors(&matrix, cfg.min_score);

    let (n, m) = (src.len(), tgt.len());
    let mut src_used = vec![false; n];
    let mut tgt_used = vec![false; m];
    for &(i, j) in &anchors {
        src_used[i] = true;
        tgt_used[j] = true;
    }

    // grow each anchor by at most one free neighbour
    let mut grown: Vec<Bead> = Vec::with_capacity(anchors.len());
    for &(i, j) in &anchors {
        let base = matrix.get(i, j);
        let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
        let mut consider = |score: f64, s: Vec<usize>, t: Vec<usize>| {
            if score > base && best.as_ref().is_none_or(|b| score > b.0) {
                best = Some((score, s, t));
            }
        };
        if j > 0 && !tgt_used[j - 1] {
            let merged = concat(&[&refs[j - 1], &refs[j]]);
            consider(sentence_bleu(&hyp[i], &merged, &cfg.bleu), vec![i], vec![j - 1, j]);
        }
        if j + 1 < m && !tgt_used[j + 1] {
            let merged = concat(&[&refs[j], &refs[j + 1]]);
            consider(sentence_bleu(&hyp[i], &merged, &cfg.bleu), vec![i], vec![j, j + 1]);
        }
        if i > 0 && !src_used[i - 1] {
            let merged = concat(&[&hyp[i - 1], &hyp[i]]);
            consider(sentence_bleu(&merged, &refs[j], &cfg.bleu), vec![i - 1, i], vec![j]);
        }
        if i + 1 < n && !src_used[i + 1] {
            let merged = concat(&[&hyp[i], &hyp[i + 1]]);
            consider(sentence_bleu(&merged, &refs[j], &cfg.bleu), vec![i, i + 1], vec![j]);
        }
        let bead = match best {
            Some((score, s, t)) => {
                s.iter().for_each(|&x| src_used[x] = true);
                t.iter().for_each(|&x| tgt_used[x] = true);
                Bead::new(s, t, Some(score), METHOD)
            }
            None => Bead::one_to_one(i, j, base, METHOD),
        };
        grown.push(bead);
    }

    // length-align each gap between consecutive anchors
    let mut beads = Vec::new();
    let (mut si, mut tj) = (0, 0);
    for bead in grown {
        let (s0, t0) = (bead.src[0], bead.tgt[0]);
        if s0 > si || t0 > tj {
            beads.extend(align_range(src, si..s0, tgt, tj..t0, &cfg.length, METHOD)?);
        }
        si = *bead.src.last().expect("anchor has a source sentence") + 1;
        tj = *bead.tgt.last().expect("anchor has a target sentence") + 1;
        beads.push(bead);
    }
    if si < n || tj < m {
        beads.extend(align_range(src, si..n, tgt, tj..m, &cfg.length, METHOD)?);
    }
    Ok(AlignmentSet::with_beads(beads, n, m))
}

/// Length parameters for aligning in the opposite direction: the length
/// ratio is inverted and the per-character variance rescaled to the other
/// side's units.
pub fn reversed_params(p: &LengthParams) -> LengthParams {
    let priors = p
        .priors
        .iter()
        .map(|(ty, &v)| (BeadType::new(ty.tgt, ty.src), v))
        .collect();
    LengthParams {
        c: 1.0 / p.c,
        s2: p.s2 / (p.c * p.c * p.c),
        priors,
    }
}

/// Aligns `src` and `tgt` given `src_mt`, the source translated into the
/// target language. With `tgt_mt` (the target translated into the source
/// language) the alignment is also computed in reverse and only beads found
/// in both directions are kept.
pub fn bleualign(
    src: &SentenceList,
    tgt: &SentenceList,
    src_mt: &SentenceList,
    tgt_mt: Option<&SentenceList>,
    cfg: &BleualignConfig,
) -> Result<AlignmentSet> {
    cfg.validate()?;
    let forward = align_one_way(src, tgt, src_mt, cfg)?;
    let Some(tgt_mt) = tgt_mt else {
        return Ok(forward);
    };
    let rev_cfg = BleualignConfig {
        length: reversed_params(&cfg.length),
        ..cfg.clone()
    };
    let backward = align_one_way(tgt, src, tgt_mt, &rev_cfg)?;
    let flipped: Vec<Bead> = backward
        .beads
        .into_iter()
        .map(|b| Bead::new(b.tgt, b.src, b.score, b.method))
        .collect();
    let beads = forward
        .beads
        .into_iter()
        .filter(|b| flipped.iter().any(|f| f.same_link(b)))
        .collect();
    Ok(AlignmentSet::with_beads(beads, src.len(), tgt.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_alignment, Lang};

    fn en(sents: &[&str]) -> SentenceList {
        SentenceList::from_sentences("d", Lang::En, sents.iter().copied())
    }

    #[test]
    fn identity_matrix_on_identical_sides() {
        let s = en(&["alpha beta gamma", "delta epsilon", "zeta eta theta iota"]);
        let m = score_matrix(&s, &s, &BleuConfig::default()).unwrap();
        for i in 0..3 {
            assert_eq!(m.get(i, i), 1.0);
        }
        let e = en(&[]);
        assert_eq!(score_matrix(&s, &e, &BleuConfig::default()).unwrap().cols, 0);
    }

    #[test]
    fn disjoint_vocabulary_scores_at_most_the_floor() {
        let a = en(&["a b c"]);
        let b = en(&["x y z"]);
        let m = score_matrix(&a, &b, &BleuConfig::default()).unwrap();
        assert!(m.get(0, 0) <= 0.01);
    }

    #[test]
    fn dominant_diagonal_anchors() {
        let m = ScoreMatrix::from_fn(4, 4, |i, j| if i == j { 0.9 } else { 0.1 });
        assert_eq!(find_anchors(&m, 0.2), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert!(find_anchors(&m, 0.95).is_empty());
    }

    #[test]
    fn crossed_pair_takes_the_better_branch() {
        let v = [[0.1, 0.8, 0.0], [0.7, 0.1, 0.0], [0.0, 0.0, 0.5]];
        let m = ScoreMatrix::from_fn(3, 3, |i, j| v[i][j]);
        assert_eq!(find_anchors(&m, 0.0), vec![(0, 1), (2, 2)]);
    }

    #[test]
    fn tie_prefers_the_diagonal() {
        let v = [[0.5, 0.5], [0.5, 0.5]];
        let m = ScoreMatrix::from_fn(2, 2, |i, j| v[i][j]);
        assert_eq!(find_anchors(&m, 0.0), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn perfect_translation_recovers_identity() {
        let tgt = en(&["the cat sat on the mat", "dogs bark loudly at night", "a bird sings in the tree"]);
        let out = bleualign(&tgt, &tgt, &tgt, None, &BleualignConfig::default()).unwrap();
        assert_eq!(out.beads.len(), 3);
        assert!(out.beads.iter().all(|b| b.bead_type() == BeadType::ONE_ONE && b.src == b.tgt));
    }

    #[test]
    fn merge_builds_a_two_to_one_bead() {
        let src = en(&["s0", "s1", "s2", "s3"]);
        let tgt = en(&["the cat sat on the mat", "dogs bark loudly at night and the birds sing", "end here now"]);
        let mt = en(&["the cat sat on the mat", "dogs bark loudly at night", "and the birds sing", "end here now"]);
        let out = bleualign(&src, &tgt, &mt, None, &BleualignConfig::default()).unwrap();
        assert!(out.beads.iter().any(|b| b.src == [1, 2] && b.tgt == [1]), "{:?}", out.beads);
        assert!(validate_alignment(&out).is_empty());
    }

    #[test]
    fn translation_count_mismatch_is_an_error() {
        let s = en(&["a", "b"]);
        let mt = en(&["a"]);
        let err = bleualign(&s, &s, &mt, None, &BleualignConfig::default()).unwrap_err();
        assert!(err.to_string().contains('2') && err.to_string().contains('1'));
    }

    #[test]
    fn reversing_twice_is_identity() {
        let p = LengthParams {
            c: 2.5,
            s2: 7.0,
            ..LengthParams::default()
        };
        let back = reversed_params(&reversed_params(&p));
        assert!((back.c - p.c).abs() < 1e-12 && (back.s2 - p.s2).abs() < 1e-9);
    }
}
