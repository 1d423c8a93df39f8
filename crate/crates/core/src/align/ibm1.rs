//! IBM Model 1 word translation probabilities trained by EM.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Source symbol every target word may align to.
pub const NULL_TOKEN: &str = "<null>";

type Row = BTreeMap<u32, f64>;

/// `t(target | source)`; each source row (including the null row) sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTable {
    src_vocab: Vec<String>,
    tgt_vocab: Vec<String>,
    src_ids: HashMap<String, u32>,
    tgt_ids: HashMap<String, u32>,
    rows: Vec<Row>,
}

impl TranslationTable {
    fn empty() -> Self {
        let mut table = TranslationTable {
            src_vocab: Vec::new(),
            tgt_vocab: Vec::new(),
            src_ids: HashMap::new(),
            tgt_ids: HashMap::new(),
            rows: Vec::new(),
        };
        table.intern_src(NULL_TOKEN);
        table
    }

    fn intern_src(&mut self, w: &str) -> u32 {
        if let Some(&id) = self.src_ids.get(w) {
            return id;
        }
        let id = self.src_vocab.len() as u32;
        self.src_vocab.push(w.to_string());
        self.src_ids.insert(w.to_string(), id);
        self.rows.push(Row::new());
        id
    }

    fn intern_tgt(&mut self, w: &str) -> u32 {
        if let Some(&id) = self.tgt_ids.get(w) {
            return id;
        }
        let id = self.tgt_vocab.len() as u32;
        self.tgt_vocab.push(w.to_string());
        self.tgt_ids.insert(w.to_string(), id);
        id
    }

    /// Builds a table from weighted `(source, target, weight)` entries,
    /// normalizing every source row. Use [`NULL_TOKEN`] for the null row.
    pub fn from_entries<'a, I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, f64)>,
    {
        let mut table = TranslationTable::empty();
        for (s, t, w) in entries {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!("weight for ({s}, {t}) must be non-negative")));
            }
            let si = table.intern_src(s) as usize;
            let ti = table.intern_tgt(t);
            *table.rows[si].entry(ti).or_insert(0.0) += w;
        }
        for row in &mut table.rows {
            let total: f64 = row.values().sum();
            if total > 0.0 {
                for v in row.values_mut() {
                    *v /= total;
                }
            }
        }
        Ok(table)
    }

    pub fn src_id(&self, w: &str) -> Option<u32> {
        self.src_ids.get(w).copied()
    }

    pub fn tgt_id(&self, w: &str) -> Option<u32> {
        self.tgt_ids.get(w).copied()
    }

    pub fn null_id(&self) -> u32 {
        0
    }

    pub fn prob_ids(&self, src: u32, tgt: u32) -> f64 {
        self.rows[src as usize].get(&tgt).copied().unwrap_or(0.0)
    }

    pub fn prob(&self, src: &str, tgt: &str) -> f64 {
        match (self.src_id(src), self.tgt_id(tgt)) {
            (Some(s), Some(t)) => self.prob_ids(s, t),
            _ => 0.0,
        }
    }

    /// Most probable translation of `src`; ties go to the smaller target word.
    pub fn best(&self, src: &str) -> Option<(&str, f64)> {
        let row = &self.rows[self.src_id(src)? as usize];
        row.iter()
            .map(|(&t, &p)| (self.tgt_vocab[t as usize].as_str(), p))
            .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(a.0)))
    }

    /// Source words, null token first.
    pub fn src_vocab(&self) -> &[String] {
        &self.src_vocab
    }

    pub fn tgt_vocab(&self) -> &[String] {
        &self.tgt_vocab
    }

    pub fn row_sum(&self, src: &str) -> f64 {
        self.src_id(src).map_or(0.0, |s| self.rows[s as usize].values().sum())
    }

    /// `source<TAB>target<TAB>probability`, sorted by source then target.
    pub fn to_tsv(&self) -> String {
        let mut lines = BTreeSet::new();
        for (s, row) in self.rows.iter().enumerate() {
            for (&t, &p) in row {
                lines.insert((self.src_vocab[s].as_str(), self.tgt_vocab[t as usize].as_str(), p.to_bits()));
            }
        }
        let mut out = String::new();
        for (s, t, p) in lines {
            let _ = writeln!(out, "{s}\t{t}\t{}", f64::from_bits(p));
        }
        out
    }

    pub fn from_tsv(text: &str, path: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let p = (f.len() == 3).then(|| f[2].parse::<f64>().ok()).flatten().ok_or_else(|| {
                Error::parse(path, n + 1, "expected `source<TAB>target<TAB>probability`")
            })?;
            entries.push((f[0], f[1], p));
        }
        TranslationTable::from_entries(entries)
    }
}

/// A sentence pair encoded against a table's vocabularies. The source side
/// excludes the null token.
type EncodedPair = (Vec<u32>, Vec<u32>);

/// Incremental EM trainer, exposing the likelihood between iterations.
#[derive(Debug, Clone)]
pub struct Ibm1Trainer {
    table: TranslationTable,
    corpus: Vec<EncodedPair>,
}

impl Ibm1Trainer {
    /// Encodes the corpus and initializes every source row (and the null row)
    /// uniformly over the target words it co-occurs with.
    pub fn new<S: AsRef<str>>(pairs: &[(Vec<S>, Vec<S>)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Empty("IBM Model 1 needs at least one sentence pair".into()));
        }
        let mut table = TranslationTable::empty();
        let mut corpus = Vec::with_capacity(pairs.len());
        let mut cooc: Vec<BTreeSet<u32>> = vec![BTreeSet::new()];
        for (src, tgt) in pairs {
            let s: Vec<u32> = src.iter().map(|w| table.intern_src(w.as_ref())).collect();
            let t: Vec<u32> = tgt.iter().map(|w| table.intern_tgt(w.as_ref())).collect();
            cooc.resize(table.src_vocab.len(), BTreeSet::new());
            for &si in s.iter().chain(std::iter::once(&0)) {
                cooc[si as usize].extend(t.iter().copied());
            }
            corpus.push((s, t));
        }
        for (si, words) in cooc.iter().enumerate() {
            let p = 1.0 / words.len().max(1) as f64;
            table.rows[si] = words.iter().map(|&t| (t, p)).collect();
        }
        Ok(Ibm1Trainer { table, corpus })
    }

    pub fn table(&self) -> &TranslationTable {
        &self.table
    }

    pub fn into_table(self) -> TranslationTable {
        self.table
    }

    /// `sum over pairs and target words of ln( sum_i t(f_j | e_i) / (l + 1) )`.
    pub fn log_likelihood(&self) -> f64 {
        let mut ll = 0.0;
        for (s, t) in &self.corpus {
            let norm = ((s.len() + 1) as f64).ln();
            for &tj in t {
                let mass: f64 = std::iter::once(0)
                    .chain(s.iter().copied())
                    .map(|si| self.table.prob_ids(si, tj))
                    .sum();
                ll += mass.ln() - norm;
            }
        }
        ll
    }

    /// One expectation-maximization round.
    pub fn step(&mut self) {
        let n_src = self.table.src_vocab.len();
        let mut counts: Vec<Row> = vec![Row::new(); n_src];
        let mut totals = vec![0.0; n_src];
        let mut probs = Vec::new();
        for (s, t) in &self.corpus {
            for &tj in t {
                probs.clear();
                probs.extend(
                    std::iter::once(0)
                        .chain(s.iter().copied())
                        .map(|si| (si, self.table.prob_ids(si, tj))),
                );
                let denom: f64 = probs.iter().map(|p| p.1).sum();
                if denom <= 0.0 {
                    continue;
                }
                for &(si, p) in &probs {
                    let c = p / denom;
                    *counts[si as usize].entry(tj).or_insert(0.0) += c;
                    totals[si as usize] += c;
                }
            }
        }
        for (si, row) in counts.iter_mut().enumerate() {
            if totals[si] > 0.0 {
                for v in row.values_mut() {
                    *v /= totals[si];
                }
            }
        }
        for (si, row) in counts.into_iter().enumerate() {
            if totals[si] > 0.0 {
                self.table.rows[si] = row;
            }
        }
    }
}

/// Trains Model 1 for `iterations` EM rounds.
pub fn train_ibm1<S: AsRef<str>>(pairs: &[(Vec<S>, Vec<S>)], iterations: usize) -> Result<TranslationTable> {
    if iterations == 0 {
        return Err(Error::InvalidParameter("EM needs at least one iteration".into()));
    }
    let mut trainer = Ibm1Trainer::new(pairs)?;
    for _ in 0..iterations {
        trainer.step();
    }
    Ok(trainer.into_table())
}
