//! Length-based sentence alignment.
//!
//! Each bead is charged `-ln prior(type) - ln(2 (1 - Phi(|delta|)))` where
//! `delta = (l_tgt - c * l_src) / sqrt(l_src * s2)` measures how far the
//! character lengths stray from the expected ratio. A dynamic program picks
//! the bead sequence of least total cost.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::normal::ln_two_sided_tail;
use crate::error::{Error, Result};
use crate::model::{AlignmentSet, Bead, BeadType, SentenceList};

pub const METHOD: &str = "gc";

/// DP moves, in tie-breaking preference order.
pub const MOVES: [BeadType; 6] = [
    BeadType::ONE_ONE,
    BeadType::ONE_ZERO,
    BeadType::ZERO_ONE,
    BeadType::TWO_ONE,
    BeadType::ONE_TWO,
    BeadType::TWO_TWO,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthParams {
    /// Expected target characters per source character.
    pub c: f64,
    /// Variance of the length mismatch per source character.
    pub s2: f64,
    pub priors: BTreeMap<BeadType, f64>,
}

impl Default for LengthParams {
    fn default() -> Self {
        LengthParams {
            c: 1.0,
            s2: 6.8,
            priors: default_priors(),
        }
    }
}

/// 0.89 / 0.0099 / 0.0445 / 0.011 renormalized to sum to one.
pub fn default_priors() -> BTreeMap<BeadType, f64> {
    let raw = [
        (BeadType::ONE_ONE, 0.89),
        (BeadType::ONE_ZERO, 0.0099),
        (BeadType::ZERO_ONE, 0.0099),
        (BeadType::TWO_ONE, 0.0445),
        (BeadType::ONE_TWO, 0.0445),
        (BeadType::TWO_TWO, 0.011),
    ];
    let total: f64 = raw.iter().map(|(_, p)| p).sum();
    raw.into_iter().map(|(t, p)| (t, p / total)).collect()
}

impl LengthParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {}", self.c)));
        }
        if !(self.s2 > 0.0 && self.s2.is_finite()) {
            return Err(Error::InvalidParameter(format!("s2 must be positive, got {}", self.s2)));
        }
        if let Some((t, p)) = self.priors.iter().find(|(_, &p)| !(p > 0.0)) {
            return Err(Error::InvalidParameter(format!("prior for {t} must be positive, got {p}")));
        }
        let total: f64 = self.priors.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("priors sum to {total}, expected 1")));
        }
        Ok(())
    }

    pub fn prior(&self, ty: BeadType) -> Option<f64> {
        self.priors.get(&ty).copied()
    }

    /// Parses `key = value` lines (`c`, `s2`, `priors.1-1`, ...). Keys not
    /// given keep their defaults; `#` starts a comment.
    pub fn from_kv_str(text: &str, path: &Path) -> Result<Self> {
        let mut params = LengthParams::default();
        let mut priors: Option<BTreeMap<BeadType, f64>> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::parse(path, n + 1, msg.to_string());
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected `key = value`"))?;
            let value: f64 = value.trim().parse().map_err(|_| bad("value is not a number"))?;
            match key.trim() {
                "c" => params.c = value,
                "s2" => params.s2 = value,
                k => {
                    let ty = k
                        .strip_prefix("priors.")
                        .and_then(|t| t.parse::<BeadType>().ok())
                        .ok_or_else(|| bad("expected c, s2 or priors.<m>-<n>"))?;
                    priors.get_or_insert_with(BTreeMap::new).insert(ty, value);
                }
            }
        }
        if let Some(p) = priors {
            params.priors = p;
        }
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_str(&text, path)
    }
}

impl fmt::Display for LengthParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "c = {}", self.c)?;
        writeln!(f, "s2 = {}", self.s2)?;
        for (t, p) in &self.priors {
            writeln!(f, "priors.{t} = {p}")?;
        }
        Ok(())
    }
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Re-estimates `c` and `s2` from paragraph (or sentence) pairs; priors keep
/// their defaults.
pub fn estimate_length_params<S: AsRef<str>, T: AsRef<str>>(pairs: &[(S, T)]) -> Result<LengthParams> {
    let lens: Vec<(f64, f64)> = pairs
        .iter()
        .map(|(s, t)| (char_len(s.as_ref()) as f64, char_len(t.as_ref()) as f64))
        .collect();
    let src_total: f64 = lens.iter().map(|l| l.0).sum();
    let tgt_total: f64 = lens.iter().map(|l| l.1).sum();
    if src_total == 0.0 {
        return Err(Error::Empty("source side has no characters".into()));
    }
    let c = tgt_total / src_total;
    let residuals: Vec<f64> = lens
        .iter()
        .filter(|(s, _)| *s > 0.0)
        .map(|&(s, t)| (t - c * s).powi(2) / s)
        .collect();
    let s2 = if residuals.len() > 1 {
        residuals.iter().sum::<f64>() / (residuals.len() - 1) as f64
    } else {
        0.0
    };
    Ok(LengthParams {
        c,
        s2: s2.max(1.0),
        priors: default_priors(),
    })
}

/// Cost of one bead covering `src_chars` and `tgt_chars` characters.
pub fn gc_cost(ty: BeadType, src_chars: usize, tgt_chars: usize, params: &LengthParams) -> Result<f64> {
    let prior = params.prior(ty).ok_or(Error::UnsupportedBeadType(ty))?;
    let (s, t) = (src_chars as f64, tgt_chars as f64);
    let spread = if src_chars > 0 { s } else { t };
    // a bead over empty text carries no length evidence
    let delta = if spread == 0.0 {
        0.0
    } else {
        (t - s * params.c) / (spread * params.s2).sqrt()
    };
    Ok((-prior.ln() - ln_two_sided_tail(delta)).max(0.0))
}

/// One step of an alignment path: a bead type anchored at sentence offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub ty: BeadType,
    pub src_start: usize,
    pub tgt_start: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    cost: f64,
    beads: usize,
    from: Option<BeadType>,
}

/// Minimum-cost path over sentence lengths. Returns the steps and the total
/// cost, summed along the path from the start.
///
/// Equal-cost alternatives are resolved toward fewer beads, then toward the
/// earlier entry of [`MOVES`] for the final step into each cell.
pub fn align_lengths(src: &[usize], tgt: &[usize], params: &LengthParams) -> Result<(Vec<Step>, f64)> {
    params.validate()?;
    let (n, m) = (src.len(), tgt.len());
    let unreached = Cell {
        cost: f64::INFINITY,
        beads: usize::MAX,
        from: None,
    };
    let mut table = vec![unreached; (n + 1) * (m + 1)];
    let at = |i: usize, j: usize| i * (m + 1) + j;
    table[0].cost = 0.0;
    table[0].beads = 0;

    let span = |lens: &[usize], end: usize, k: usize| -> usize { lens[end - k..end].iter().sum() };

    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let mut best = unreached;
            for ty in MOVES {
                if ty.src > i || ty.tgt > j || !params.priors.contains_key(&ty) {
                    continue;
                }
                let prev = table[at(i - ty.src, j - ty.tgt)];
                if prev.cost.is_infinite() {
                    continue;
                }
                let c = gc_cost(ty, span(src, i, ty.src), span(tgt, j, ty.tgt), params)?;
                let cand = Cell {
                    cost: prev.cost + c,
                    beads: prev.beads + 1,
                    from: Some(ty),
                };
                if cand.cost < best.cost || (cand.cost == best.cost && cand.beads < best.beads) {
                    best = cand;
                }
            }
            table[at(i, j)] = best;
        }
    }

    let end = table[at(n, m)];
    if end.cost.is_infinite() {
        return Err(Error::InvalidParameter(
            "no alignment path exists with the configured bead types".into(),
        ));
    }
    let mut steps = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let cell = table[at(i, j)];
        let ty = cell.from.expect("reached cell has a predecessor");
        let (pi, pj) = (i - ty.src, j - ty.tgt);
        steps.push(Step {
            ty,
            src_start: pi,
            tgt_start: pj,
            cost: cell.cost - table[at(pi, pj)].cost,
        });
        i = pi;
        j = pj;
    }
    steps.reverse();
    // recompute per-step costs exactly rather than by subtraction
    for s in &mut steps {
        s.cost = gc_cost(
            s.ty,
            span(src, s.src_start + s.ty.src, s.ty.src),
            span(tgt, s.tgt_start + s.ty.tgt, s.ty.tgt),
            params,
        )?;
    }
    Ok((steps, end.cost))
}

fn steps_to_beads(steps: &[Step], src_offset: usize, tgt_offset: usize, method: &str) -> Vec<Bead> {
    steps
        .iter()
        .map(|s| {
            Bead::new(
                (src_offset + s.src_start..src_offset + s.src_start + s.ty.src).collect(),
                (tgt_offset + s.tgt_start..tgt_offset + s.tgt_start + s.ty.tgt).collect(),
                Some(-s.cost),
                method,
            )
        })
        .collect()
}

/// Aligns the sentences in `src[src_range]` against `tgt[tgt_range]`,
/// returning beads with absolute indices.
pub(crate) fn align_range(
    src: &SentenceList,
    src_range: std::ops::Range<usize>,
    tgt: &SentenceList,
    tgt_range: std::ops::Range<usize>,
    params: &LengthParams,
    method: &str,
) -> Result<Vec<Bead>> {
    let sl: Vec<usize> = src.sentences[src_range.clone()].iter().map(|s| char_len(s)).collect();
    let tl: Vec<usize> = tgt.sentences[tgt_range.clone()].iter().map(|s| char_len(s)).collect();
    let (steps, _) = align_lengths(&sl, &tl, params)?;
    Ok(steps_to_beads(&steps, src_range.start, tgt_range.start, method))
}

/// Aligns two whole documents as one lattice.
pub fn gc_align(src: &SentenceList, tgt: &SentenceList, params: &LengthParams) -> Result<AlignmentSet> {
    let beads = align_range(src, 0..src.len(), tgt, 0..tgt.len(), params, METHOD)?;
    Ok(AlignmentSet::with_beads(beads, src.len(), tgt.len()))
}

/// Aligns paragraph by paragraph when both sides have the same number of
/// paragraphs, otherwise falls back to [`gc_align`].
pub fn gc_align_by_paragraph(
    src: &SentenceList,
    tgt: &SentenceList,
    params: &LengthParams,
) -> Result<AlignmentSet> {
    let sp = src.paragraph_ranges();
    let tp = tgt.paragraph_ranges();
    if sp.len() != tp.len() || sp.is_empty() {
        return gc_align(src, tgt, params);
    }
    let mut beads = Vec::new();
    for (s, t) in sp.into_iter().zip(tp) {
        beads.extend(align_range(src, s, tgt, t, params, METHOD)?);
    }
    Ok(AlignmentSet::with_beads(beads, src.len(), tgt.len()))
}
