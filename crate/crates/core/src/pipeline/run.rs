use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{AlignMethod, PipelineConfig, SegmenterKind};
use super::dedup::dedup_indices;
use super::split::{split_corpus, Split};
use super::stats::{corpus_stats, BitextRow, CorpusStats};
use crate::align::{
    bleualign, estimate_length_params, gc_align_by_paragraph, moore_align_corpus, BleualignConfig, LengthParams,
    MooreConfig,
};
use crate::model::{
    read_documents, read_lines, write_alignments, write_sentences, AlignmentSet, Document, Lang, SentenceList,
};
use crate::preprocess::{
    filter_boilerplate, normalize_document, paragraph_count_report, stitch_paragraphs, train_truecaser,
    truecase_first_token, FilterRules, Removal, StitchEvent, TruecaseModel,
};
use crate::sbd::{sbd_diff_report, segment_document, train_punkt, AbbrevList, EnSegmenter};
use crate::{Error, Result};

pub const RUN_LOG: &str = "run_log.jsonl";
pub const PARTIAL_SUFFIX: &str = ".partial";

/// Source and target document of one article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocPair {
    pub pair_id: String,
    pub src: Document,
    pub tgt: Document,
}

impl DocPair {
    fn as_tuple(&self) -> (Document, Document) {
        (self.src.clone(), self.tgt.clone())
    }
}

/// Groups documents by pair id, in order of first appearance. Returns the
/// complete pairs and the ids of pairs missing a side.
pub fn pair_documents(docs: Vec<Document>, langs: (Lang, Lang)) -> (Vec<DocPair>, Vec<String>) {
    let mut order: Vec<String> = Vec::new();
    let mut sides: BTreeMap<String, (Option<Document>, Option<Document>)> = BTreeMap::new();
    for doc in docs {
        let slot = sides.entry(doc.meta.pair_id.clone()).or_insert_with(|| {
            order.push(doc.meta.pair_id.clone());
            (None, None)
        });
        if doc.lang() == langs.0 {
            slot.0 = Some(doc);
        } else if doc.lang() == langs.1 {
            slot.1 = Some(doc);
        }
    }
    let mut pairs = Vec::new();
    let mut unpaired = Vec::new();
    for id in order {
        match sides.remove(&id) {
            Some((Some(src), Some(tgt))) => pairs.push(DocPair { pair_id: id, src, tgt }),
            _ => unpaired.push(id),
        }
    }
    (pairs, unpaired)
}

/// One entry of the preprocessing log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreprocessEvent {
    pub doc: String,
    #[serde(flatten)]
    pub kind: PreprocessKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PreprocessKind {
    Stitch(StitchEvent),
    Removed {
        event: &'static str,
        paragraph: usize,
        rule: String,
    },
}

impl PreprocessKind {
    fn removal(r: Removal) -> Self {
        PreprocessKind::Removed {
            event: "removed",
            paragraph: r.paragraph,
            rule: r.rule,
        }
    }
}

fn preprocess_doc(doc: &Document, rules: &FilterRules) -> (Document, Vec<PreprocessEvent>) {
    let normalized = normalize_document(doc);
    let (stitched, stitch_log) = stitch_paragraphs(&normalized);
    let (filtered, removals) = filter_boilerplate(&stitched, rules);
    let id = &doc.meta.id;
    let events = stitch_log
        .into_iter()
        .map(PreprocessKind::Stitch)
        .chain(removals.into_iter().map(PreprocessKind::removal))
        .map(|kind| PreprocessEvent { doc: id.clone(), kind })
        .collect();
    (filtered, events)
}

/// Normalizes, stitches and filters every document. Runs on the current
/// rayon pool; output order follows input order.
pub fn preprocess_corpus(pairs: &[DocPair], rules: &FilterRules) -> (Vec<DocPair>, Vec<PreprocessEvent>) {
    let done: Vec<(DocPair, Vec<PreprocessEvent>)> = pairs
        .par_iter()
        .map(|p| {
            let (src, mut log) = preprocess_doc(&p.src, rules);
            let (tgt, tlog) = preprocess_doc(&p.tgt, rules);
            log.extend(tlog);
            (
                DocPair {
                    pair_id: p.pair_id.clone(),
                    src,
                    tgt,
                },
                log,
            )
        })
        .collect();
    let mut log = Vec::new();
    let mut out = Vec::with_capacity(done.len());
    for (p, l) in done {
        out.push(p);
        log.extend(l);
    }
    (out, log)
}

/// English documents of the corpus, whichever side they are on.
fn english_docs(pairs: &[DocPair]) -> Vec<Document> {
    pairs
        .iter()
        .flat_map(|p| [&p.src, &p.tgt])
        .filter(|d| d.lang() == Lang::En)
        .cloned()
        .collect()
}

/// Segments both sides of every pair. English sentences get their first
/// word truecased when a model is given.
pub fn segment_corpus(
    pairs: &[DocPair],
    en: &EnSegmenter,
    truecaser: Option<&TruecaseModel>,
) -> Vec<(SentenceList, SentenceList)> {
    let seg = |d: &Document| {
        let mut list = segment_document(d, en);
        if let (Lang::En, Some(model)) = (d.lang(), truecaser) {
            for s in &mut list.sentences {
                *s = truecase_first_token(s, model);
            }
        }
        list
    };
    pairs.par_iter().map(|p| (seg(&p.src), seg(&p.tgt))).collect()
}

/// Paragraph pairs for estimating Gale-Church parameters: every paragraph
/// pair of articles whose paragraph counts agree, and whole texts otherwise.
pub fn length_training_pairs(pairs: &[DocPair]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for p in pairs {
        if p.src.paragraphs.len() == p.tgt.paragraphs.len() {
            out.extend(p.src.paragraphs.iter().cloned().zip(p.tgt.paragraphs.iter().cloned()));
        } else {
            out.push((p.src.lang().join(&p.src.paragraphs), p.tgt.lang().join(&p.tgt.paragraphs)));
        }
    }
    out
}

/// Reads `<dir>/<doc_id>.txt` as a list of translated sentences.
pub fn read_translation(dir: &Path, doc_id: &str, lang: Lang) -> Result<SentenceList> {
    let path = dir.join(format!("{doc_id}.txt"));
    if !path.is_file() {
        return Err(Error::io(
            &path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "machine translation file not found"),
        ));
    }
    Ok(SentenceList::from_sentences(doc_id, lang, read_lines(&path)?))
}

/// Aligner settings for [`align_corpus`].
#[derive(Debug, Clone)]
pub enum AlignerSetup {
    Gc(LengthParams),
    Moore(MooreConfig),
    /// Source translations per document and, for the bidirectional variant,
    /// target translations.
    Bleualign {
        cfg: BleualignConfig,
        src_mt: Vec<SentenceList>,
        tgt_mt: Option<Vec<SentenceList>>,
    },
}

/// Aligns every document pair, in input order.
pub fn align_corpus(docs: &[(SentenceList, SentenceList)], setup: &AlignerSetup) -> Result<Vec<AlignmentSet>> {
    match setup {
        AlignerSetup::Gc(params) => docs.par_iter().map(|(s, t)| gc_align_by_paragraph(s, t, params)).collect(),
        AlignerSetup::Moore(cfg) => moore_align_corpus(docs, cfg).map(|(sets, _)| sets),
        AlignerSetup::Bleualign { cfg, src_mt, tgt_mt } => {
            if src_mt.len() != docs.len() || tgt_mt.as_ref().is_some_and(|t| t.len() != docs.len()) {
                return Err(Error::Mismatch("one translation per document pair is required".into()));
            }
            (0..docs.len())
                .into_par_iter()
                .map(|k| {
                    let (s, t) = &docs[k];
                    bleualign(s, t, &src_mt[k], tgt_mt.as_ref().map(|v| &v[k]), cfg)
                })
                .collect()
        }
    }
}

/// Sentence pairs of the two-sided beads, in bead order.
pub fn bitext_rows(article: &str, src: &SentenceList, tgt: &SentenceList, set: &AlignmentSet) -> Vec<BitextRow> {
    set.beads
        .iter()
        .filter(|b| !b.src.is_empty() && !b.tgt.is_empty())
        .map(|b| BitextRow {
            article: article.to_string(),
            src: src.joined(&b.src),
            tgt: tgt.joined(&b.tgt),
        })
        .collect()
}

/// What a finished run produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub articles: usize,
    pub aligned_pairs: usize,
    pub dedup_removed: usize,
    pub stats: CorpusStats,
    pub splits: BTreeMap<Split, CorpusStats>,
}

#[derive(Serialize)]
struct StageRecord<'a> {
    stage: &'a str,
    input: usize,
    output: usize,
    duration_ms: f64,
    #[serde(skip_serializing_if = "Value::is_null")]
    detail: Value,
}

/// Files written so far, so a failed run can flag them.
struct Outputs {
    root: PathBuf,
    written: Vec<PathBuf>,
    log: String,
}

impl Outputs {
    fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Outputs {
            root: root.to_path_buf(),
            written: Vec::new(),
            log: String::new(),
        })
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    fn track(&mut self, path: PathBuf) {
        self.written.push(path);
    }

    fn write(&mut self, rel: &str, text: &str) -> Result<()> {
        let path = self.path(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.track(path);
        Ok(())
    }

    fn record(&mut self, stage: &str, input: usize, output: usize, started: Instant, detail: Value) {
        let rec = StageRecord {
            stage,
            input,
            output,
            duration_ms: started.elapsed().as_secs_f64() * 1000.0,
            detail,
        };
        self.log.push_str(&serde_json::to_string(&rec).expect("log record serializes"));
        self.log.push('\n');
    }

    fn flush_log(&mut self) -> Result<()> {
        let log = std::mem::take(&mut self.log);
        self.write(RUN_LOG, &log)?;
        self.log = log;
        Ok(())
    }

    /// Renames every written file except the run log to `<name>.partial`.
    /// The log is complete: its last record names the failure.
    fn mark_partial(&self) {
        for p in self.written.iter().filter(|p| !p.ends_with(RUN_LOG)) {
            let mut name = p.as_os_str().to_owned();
            name.push(PARTIAL_SUFFIX);
            if let Err(e) = fs::rename(p, &name) {
                log::warn!("could not flag {} as partial: {e}", p.display());
            }
        }
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

fn tsv_escape_check(rows: &[BitextRow]) -> Result<()> {
    for r in rows {
        if r.src.contains(['\t', '\n']) || r.tgt.contains(['\t', '\n']) {
            return Err(Error::Mismatch(format!(
                "a sentence of `{}` contains a tab or line break and cannot go into a TSV",
                r.article
            )));
        }
    }
    Ok(())
}

fn bitext_tsv<'a>(rows: impl IntoIterator<Item = &'a BitextRow>) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&r.src);
        out.push('\t');
        out.push_str(&r.tgt);
        out.push('\n');
    }
    out
}

/// Runs preprocess, segmentation, alignment, dedup and split, writing
/// everything under `paths.output`:
///
/// * `sentences/<doc id>.tsv`, `alignments/<pair id>.tsv`
/// * `bitext.tsv` (deduplicated, corpus order) and `splits/<split>.tsv`
/// * `splits/manifest.tsv` (`article<TAB>split<TAB>pairs`)
/// * `reports/` (paragraph counts, sentence count differences, preprocessing log)
/// * `stats.json` and `run_log.jsonl`
///
/// `jobs` sets the worker count (0 picks one per core); results do not
/// depend on it. On failure the files written so far get a `.partial`
/// suffix and the error names the stage.
pub fn run_pipeline(config: &PipelineConfig, jobs: usize) -> Result<RunSummary> {
    stage("config", config.validate())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start {jobs} workers: {e}")))?;
    let mut out = Outputs::new(&config.paths.output)?;
    let result = pool.install(|| run_stages(config, &mut out));
    match result {
        Ok(summary) => Ok(summary),
        Err(e) => {
            out.log.push_str(&json!({"stage": "failed", "error": e.to_string()}).to_string());
            out.log.push('\n');
            if let Err(le) = out.flush_log() {
                log::warn!("could not write the run log: {le}");
            }
            out.mark_partial();
            Err(e)
        }
    }
}

fn run_stages(config: &PipelineConfig, out: &mut Outputs) -> Result<RunSummary> {
    let langs = (config.source_lang, config.target_lang);
    out.log.push_str(
        &json!({
            "stage": "config",
            "hash": config.dedup.hash.name(),
            "method": config.align.method.name(),
            "segmenter": config.sbd.segmenter,
            "source_lang": langs.0,
            "target_lang": langs.1,
        })
        .to_string(),
    );
    out.log.push('\n');

    // ingest
    let t = Instant::now();
    let docs = stage("ingest", read_documents(&config.paths.input))?;
    let n_docs = docs.len();
    let (pairs, unpaired) = pair_documents(docs, langs);
    for id in &unpaired {
        log::warn!("pair `{id}` lacks a {} or {} document; skipped", langs.0, langs.1);
    }
    if pairs.is_empty() {
        return stage("ingest", Err(Error::Empty("no complete document pairs in the input".into())));
    }
    out.record("ingest", n_docs, pairs.len(), t, json!({ "unpaired": unpaired }));

    // preprocess
    let t = Instant::now();
    let rules = match &config.paths.patterns {
        Some(p) => stage("preprocess", FilterRules::load(p))?,
        None => FilterRules::defaults(),
    };
    let (clean, events) = preprocess_corpus(&pairs, &rules);
    let pre: Vec<_> = pairs.iter().map(DocPair::as_tuple).collect();
    let post: Vec<_> = clean.iter().map(DocPair::as_tuple).collect();
    let (_, counts_csv) = stage("preprocess", paragraph_count_report(&pre, &post))?;
    stage("preprocess", out.write("reports/paragraph_counts.csv", &counts_csv))?;
    let mut event_log = String::new();
    for e in &events {
        event_log.push_str(&serde_json::to_string(e).expect("event serializes"));
        event_log.push('\n');
    }
    stage("preprocess", out.write("reports/preprocess_log.jsonl", &event_log))?;
    let truecaser = config.preprocess.truecase.then(|| train_truecaser(&english_docs(&clean)));
    let paragraphs = |ps: &[DocPair]| ps.iter().map(|p| p.src.paragraphs.len() + p.tgt.paragraphs.len()).sum::<usize>();
    out.record(
        "preprocess",
        paragraphs(&pairs),
        paragraphs(&clean),
        t,
        json!({ "events": events.len() }),
    );

    // sbd
    let t = Instant::now();
    let en = match config.sbd.segmenter {
        SegmenterKind::Rules => EnSegmenter::Rules(match &config.paths.abbrevs {
            Some(p) => stage("sbd", AbbrevList::load(p))?,
            None => AbbrevList::defaults(),
        }),
        SegmenterKind::Punkt => EnSegmenter::Punkt(train_punkt(&english_docs(&clean))),
    };
    let sentences = segment_corpus(&clean, &en, truecaser.as_ref());
    let mut zh_counts = Vec::new();
    let mut en_counts = Vec::new();
    for (p, (s, tg)) in clean.iter().zip(&sentences) {
        for list in [s, tg] {
            let path = out.path(&format!("sentences/{}.tsv", list.doc_id));
            stage("sbd", write_sentences(&path, list))?;
            out.track(path);
            match list.lang {
                Lang::Zh => zh_counts.push((p.pair_id.clone(), list.len())),
                Lang::En => en_counts.push((p.pair_id.clone(), list.len())),
            }
        }
    }
    let diff = stage("sbd", sbd_diff_report(&zh_counts, &en_counts))?;
    stage("sbd", out.write("reports/sbd_diff.csv", &stage("sbd", diff.to_csv())?))?;
    let n_sent: usize = sentences.iter().map(|(s, t)| s.len() + t.len()).sum();
    out.record(
        "sbd",
        paragraphs(&clean),
        n_sent,
        t,
        json!({ "median_abs_diff": diff.median_abs_diff() }),
    );

    // align
    let t = Instant::now();
    let setup = stage("align", aligner_setup(config, &clean, &sentences))?;
    let sets = stage("align", align_corpus(&sentences, &setup))?;
    let mut rows = Vec::new();
    for ((p, (s, tg)), set) in clean.iter().zip(&sentences).zip(&sets) {
        let path = out.path(&format!("alignments/{}.tsv", p.pair_id));
        stage("align", write_alignments(set, &path))?;
        out.track(path);
        rows.extend(bitext_rows(&p.pair_id, s, tg, set));
    }
    let n_beads: usize = sets.iter().map(AlignmentSet::len).sum();
    out.record(
        "align",
        n_sent,
        rows.len(),
        t,
        json!({ "method": config.align.method.name(), "beads": n_beads, "accepted_beads": rows.len() }),
    );

    // dedup
    let t = Instant::now();
    stage("dedup", tsv_escape_check(&rows))?;
    let keyed: Vec<(&str, &str)> = rows.iter().map(|r| (r.src.as_str(), r.tgt.as_str())).collect();
    let keep = dedup_indices(&keyed, langs);
    let removed = rows.len() - keep.len();
    let kept: Vec<BitextRow> = keep.into_iter().map(|i| rows[i].clone()).collect();
    stage("dedup", out.write("bitext.tsv", &bitext_tsv(&kept)))?;
    out.record(
        "dedup",
        rows.len(),
        kept.len(),
        t,
        json!({ "removed": removed, "hash": config.dedup.hash.name() }),
    );

    // split
    let t = Instant::now();
    let mut per_article: BTreeMap<&str, usize> = clean.iter().map(|p| (p.pair_id.as_str(), 0)).collect();
    for r in &kept {
        *per_article.get_mut(r.article.as_str()).expect("row from a known article") += 1;
    }
    let articles: Vec<_> = clean
        .iter()
        .map(|p| {
            let mut meta = p.src.meta.clone();
            meta.id = p.pair_id.clone();
            (meta, per_article[p.pair_id.as_str()])
        })
        .collect();
    let assignment = stage("split", split_corpus(&articles, &config.split))?;
    let mut manifest = String::from("article\tsplit\tpairs\n");
    for p in &clean {
        let id = p.pair_id.as_str();
        manifest.push_str(&format!("{id}\t{}\t{}\n", assignment[id], per_article[id]));
    }
    stage("split", out.write("splits/manifest.tsv", &manifest))?;
    let mut splits = BTreeMap::new();
    for split in Split::ALL {
        let part: Vec<BitextRow> = kept.iter().filter(|r| assignment[&r.article] == split).cloned().collect();
        stage("split", out.write(&format!("splits/{split}.tsv"), &bitext_tsv(&part)))?;
        splits.insert(split, corpus_stats(&part, langs));
    }
    let counts: BTreeMap<String, usize> = Split::ALL
        .iter()
        .map(|s| (s.to_string(), assignment.values().filter(|&&x| x == *s).count()))
        .collect();
    out.record("split", kept.len(), kept.len(), t, json!({ "articles": counts }));

    // stats
    let t = Instant::now();
    let stats = corpus_stats(&kept, langs);
    let summary = RunSummary {
        articles: clean.len(),
        aligned_pairs: rows.len(),
        dedup_removed: removed,
        stats,
        splits,
    };
    let report = json!({
        "tokenizer": "zh: one token per Han character, Latin and digit runs as words; en: words with punctuation split off",
        "corpus": summary.stats,
        "splits": summary.splits,
        "aligned_pairs": summary.aligned_pairs,
        "dedup_removed": summary.dedup_removed,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("stats serialize");
    text.push('\n');
    stage("stats", out.write("stats.json", &text))?;
    out.record("stats", kept.len(), 1, t, Value::Null);
    out.flush_log()?;
    Ok(summary)
}

fn gc_params(config: &PipelineConfig, clean: &[DocPair]) -> Result<LengthParams> {
    match &config.paths.length_params {
        Some(p) => LengthParams::load(p),
        None => {
            let training = length_training_pairs(clean);
            estimate_length_params(&training)
        }
    }
}

fn aligner_setup(
    config: &PipelineConfig,
    clean: &[DocPair],
    sentences: &[(SentenceList, SentenceList)],
) -> Result<AlignerSetup> {
    Ok(match config.align.method {
        AlignMethod::Gc => AlignerSetup::Gc(gc_params(config, clean)?),
        AlignMethod::Moore => AlignerSetup::Moore(config.align.moore()),
        AlignMethod::Bleualign => {
            let src_dir = config
                .paths
                .src_mt
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("bleualign needs paths.src_mt".into()))?;
            let src_mt = sentences
                .iter()
                .map(|(s, t)| read_translation(src_dir, &s.doc_id, t.lang))
                .collect::<Result<Vec<_>>>()?;
            let tgt_mt = match &config.paths.tgt_mt {
                Some(dir) => Some(
                    sentences
                        .iter()
                        .map(|(s, t)| read_translation(dir, &t.doc_id, s.lang))
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            AlignerSetup::Bleualign {
                cfg: BleualignConfig {
                    bleu: config.bleu,
                    min_score: config.align.min_score,
                    length: gc_params(config, clean)?,
                },
                src_mt,
                tgt_mt,
            }
        }
    })
}
