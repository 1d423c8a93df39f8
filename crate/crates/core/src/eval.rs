//! Scoring predicted alignments against a gold standard.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::align::bleualign::{bleualign, BleualignConfig};
use crate::align::gale_church::{gc_align_by_paragraph, LengthParams};
use crate::align::moore::{moore_align_corpus, MooreConfig};
use crate::error::{Error, Result};
use crate::model::{AlignmentSet, Bead, BeadType, GoldAlignment, SentenceList};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_counts(matched: usize, predicted: usize, gold: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(matched, predicted);
        let recall = ratio(matched, gold);
        Prf {
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
        }
    }
}

/// `2pr / (p + r)`, zero when both are zero.
pub fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Raw counts behind a [`Prf`], summable across documents.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchCounts {
    pub matched: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl MatchCounts {
    pub fn add(&mut self, other: MatchCounts) {
        self.matched += other.matched;
        self.predicted += other.predicted;
        self.gold += other.gold;
    }

    pub fn prf(&self) -> Prf {
        Prf::from_counts(self.matched, self.predicted, self.gold)
    }
}

fn considered(beads: &[Bead], one_to_one_only: bool) -> impl Iterator<Item = &Bead> {
    beads.iter().filter(move |b| !one_to_one_only || b.bead_type().is_one_to_one())
}

/// Exact-bead match counts; see [`prf1`].
pub fn match_counts(pred: &AlignmentSet, gold: &GoldAlignment, one_to_one_only: bool) -> Result<MatchCounts> {
    let g = &gold.alignment;
    if pred.src_len != g.src_len || pred.tgt_len != g.tgt_len {
        return Err(Error::Mismatch(format!(
            "prediction covers {}x{} sentences but gold covers {}x{}",
            pred.src_len, pred.tgt_len, g.src_len, g.tgt_len
        )));
    }
    let gold_beads: Vec<&Bead> = considered(&g.beads, one_to_one_only).collect();
    let pred_beads: Vec<&Bead> = considered(&pred.beads, one_to_one_only).collect();
    let matched = pred_beads.iter().filter(|p| gold_beads.iter().any(|g| g.same_link(p))).count();
    Ok(MatchCounts {
        matched,
        predicted: pred_beads.len(),
        gold: gold_beads.len(),
    })
}

/// Precision, recall and F1 of exact bead matches, optionally restricted to
/// 1-1 beads on both sides.
pub fn prf1(pred: &AlignmentSet, gold: &GoldAlignment, one_to_one_only: bool) -> Result<Prf> {
    Ok(match_counts(pred, gold, one_to_one_only)?.prf())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeShare {
    #[serde(rename = "type")]
    pub ty: BeadType,
    pub count: usize,
    /// Percent of all beads, rounded to one decimal.
    pub percent: f64,
}

/// Bead counts by type, in (source, target) order.
pub fn alignment_type_distribution(gold: &GoldAlignment) -> Vec<TypeShare> {
    let mut counts = std::collections::BTreeMap::<BeadType, usize>::new();
    for b in gold.beads() {
        *counts.entry(b.bead_type()).or_default() += 1;
    }
    let total = gold.beads().len();
    counts
        .into_iter()
        .map(|(ty, count)| TypeShare {
            ty,
            count,
            percent: (1000.0 * count as f64 / total as f64).round() / 10.0,
        })
        .collect()
}

/// Renders a distribution as `type,count,percent` CSV.
pub fn distribution_csv(rows: &[TypeShare]) -> String {
    let mut out = String::from("type,count,percent\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.1}\n", r.ty, r.count, r.percent));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "gc")]
    GaleChurch,
    #[serde(rename = "moore")]
    Moore,
    #[serde(rename = "bleualign-uni")]
    BleualignUni,
    #[serde(rename = "bleualign-bi")]
    BleualignBi,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::GaleChurch, Method::Moore, Method::BleualignUni, Method::BleualignBi];

    pub fn name(self) -> &'static str {
        match self {
            Method::GaleChurch => "gc",
            Method::Moore => "moore",
            Method::BleualignUni => "bleualign-uni",
            Method::BleualignBi => "bleualign-bi",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown alignment method `{s}`")))
    }
}

/// One article pair with its gold alignment and optional translations.
#[derive(Debug, Clone)]
pub struct EvalDoc {
    pub src: SentenceList,
    pub tgt: SentenceList,
    pub gold: GoldAlignment,
    /// Source translated into the target language.
    pub src_mt: Option<SentenceList>,
    /// Target translated into the source language.
    pub tgt_mt: Option<SentenceList>,
}

#[derive(Debug, Clone, Default)]
pub struct EvalConfig {
    pub length: LengthParams,
    pub moore: MooreConfig,
    pub bleualign: BleualignConfig,
    /// Score every bead type instead of 1-1 beads only.
    pub all_bead_types: bool,
}

fn need<'a>(mt: &'a Option<SentenceList>, what: &str, doc: &str) -> Result<&'a SentenceList> {
    mt.as_ref()
        .ok_or_else(|| Error::Empty(format!("{what} translation missing for document `{doc}`")))
}

/// Runs one aligner over every document, in order.
pub fn run_method(docs: &[EvalDoc], method: Method, cfg: &EvalConfig) -> Result<Vec<AlignmentSet>> {
    match method {
        Method::GaleChurch => docs.iter().map(|d| gc_align_by_paragraph(&d.src, &d.tgt, &cfg.length)).collect(),
        Method::Moore => {
            let pairs: Vec<(SentenceList, SentenceList)> = docs.iter().map(|d| (d.src.clone(), d.tgt.clone())).collect();
            Ok(moore_align_corpus(&pairs, &cfg.moore)?.0)
        }
        Method::BleualignUni | Method::BleualignBi => {
            let bcfg = BleualignConfig {
                length: cfg.length.clone(),
                ..cfg.bleualign.clone()
            };
            docs.iter()
                .map(|d| {
                    let src_mt = need(&d.src_mt, "source", &d.src.doc_id)?;
                    let tgt_mt = match method {
                        Method::BleualignBi => Some(need(&d.tgt_mt, "target", &d.src.doc_id)?),
                        _ => None,
                    };
                    bleualign(&d.src, &d.tgt, src_mt, tgt_mt, &bcfg)
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub method: Method,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Predicted beads with more than one sentence on some side; these are
    /// outside 1-1 scoring.
    pub many_to_many: usize,
}

/// Scores each method against the gold alignments, micro-averaging over
/// documents.
pub fn aligner_report(docs: &[EvalDoc], methods: &[Method], cfg: &EvalConfig) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::with_capacity(methods.len());
    for &method in methods {
        let preds = run_method(docs, method, cfg)?;
        let mut counts = MatchCounts::default();
        let mut many = 0;
        for (pred, doc) in preds.iter().zip(docs) {
            counts.add(match_counts(pred, &doc.gold, !cfg.all_bead_types)?);
            many += pred.beads.iter().filter(|b| b.bead_type().is_many()).count();
        }
        let prf = counts.prf();
        rows.push(ReportRow {
            method,
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
            many_to_many: many,
        });
    }
    Ok(rows)
}

/// `method,precision,recall,f1,many_to_many` CSV.
pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from("method,precision,recall,f1,many_to_many\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{}\n",
            r.method, r.precision, r.recall, r.f1, r.many_to_many
        ));
    }
    out
}
