use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BleuConfig {
    pub n_max: usize,
    /// Numerator used in place of zero clipped matches.
    pub epsilon: f64,
    pub use_brevity_penalty: bool,
}

impl Default for BleuConfig {
    fn default() -> Self {
        BleuConfig {
            n_max: 2,
            epsilon: 0.01,
            use_brevity_penalty: true,
        }
    }
}

impl BleuConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidParameter("BLEU n_max must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "BLEU epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Counts of every n-gram of order `1..=n_max`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NgramProfile<'a> {
    pub counts: HashMap<&'a [String], u32>,
}

impl<'a> NgramProfile<'a> {
    pub fn new(tokens: &'a [String], n_max: usize) -> Self {
        let mut counts = HashMap::new();
        for n in 1..=n_max.min(tokens.len()) {
            for gram in tokens.windows(n) {
                *counts.entry(gram).or_insert(0) += 1;
            }
        }
        NgramProfile { counts }
    }

    pub fn count(&self, gram: &[String]) -> u32 {
        self.counts.get(gram).copied().unwrap_or(0)
    }
}

/// Sufficient statistics for BLEU: clipped matches and hypothesis n-gram
/// totals per order, plus both lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: Vec<u64>,
    pub totals: Vec<u64>,
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub fn zero(n_max: usize) -> Self {
        BleuStats {
            matches: vec![0; n_max],
            totals: vec![0; n_max],
            hyp_len: 0,
            ref_len: 0,
        }
    }

    pub fn compute(hyp: &[String], reference: &[String], n_max: usize) -> Self {
        let hp = NgramProfile::new(hyp, n_max);
        let rp = NgramProfile::new(reference, n_max);
        let mut stats = BleuStats::zero(n_max);
        stats.hyp_len = hyp.len() as u64;
        stats.ref_len = reference.len() as u64;
        for (gram, &c) in &hp.counts {
            let n = gram.len() - 1;
            stats.totals[n] += c as u64;
            stats.matches[n] += c.min(rp.count(gram)) as u64;
        }
        stats
    }

    pub fn add(&mut self, other: &BleuStats) {
        for n in 0..self.matches.len() {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// Smoothed precision of order `n` (1-based), or `None` when the
    /// hypothesis has no n-grams of that order.
    pub fn precision(&self, n: usize, epsilon: f64) -> Option<f64> {
        let total = self.totals[n - 1];
        if total == 0 {
            return None;
        }
        let m = self.matches[n - 1];
        let num = if m == 0 { epsilon } else { m as f64 };
        Some(num / total as f64)
    }

    pub fn brevity_penalty(&self) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp().min(1.0)
    }

    /// Geometric mean of the available precisions times the brevity penalty.
    /// Orders longer than the hypothesis are left out of the mean.
    pub fn score(&self, cfg: &BleuConfig) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let logs: Vec<f64> = (1..=self.matches.len())
            .filter_map(|n| self.precision(n, cfg.epsilon))
            .map(f64::ln)
            .collect();
        if logs.is_empty() {
            return 0.0;
        }
        let mut s = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
        if cfg.use_brevity_penalty {
            s *= self.brevity_penalty();
        }
        s.clamp(0.0, 1.0)
    }
}

pub fn sentence_bleu(hyp: &[String], reference: &[String], cfg: &BleuConfig) -> f64 {
    BleuStats::compute(hyp, reference, cfg.n_max).score(cfg)
}

/// Micro-averaged BLEU over a corpus of (hypothesis, reference) pairs.
pub fn corpus_bleu<H, R>(hyps: &[H], refs: &[R], cfg: &BleuConfig) -> Result<f64>
where
    H: AsRef<[String]>,
    R: AsRef<[String]>,
{
    if hyps.len() != refs.len() {
        return Err(Error::Mismatch(format!(
            "{} hypotheses but {} references",
            hyps.len(),
            refs.len()
        )));
    }
    if hyps.is_empty() {
        return Err(Error::Empty("corpus BLEU needs at least one pair".into()));
    }
    let mut total = BleuStats::zero(cfg.n_max);
    for (h, r) in hyps.iter().zip(refs) {
        total.add(&BleuStats::compute(h.as_ref(), r.as_ref(), cfg.n_max));
    }
    Ok(total.score(cfg))
}
