use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use paracorp::align::{
    bleualign, estimate_length_params, gc_align_by_paragraph, moore_align_corpus, BleualignConfig, LengthParams,
};
use paracorp::eval::{alignment_type_distribution, distribution_csv, prf1};
use paracorp::model::{
    read_alignments, read_documents, read_gold, read_lines, read_sentences, write_alignments, write_documents,
    write_sentences, AlignmentSet, ArticleMeta, Document, Lang, SentenceList,
};
use paracorp::pipeline::{
    bitext_rows, corpus_stats, dedup_pairs, pair_documents, preprocess_corpus, run_pipeline,
    segment_corpus, split_corpus, AlignMethod, BitextRow, DocPair, PipelineConfig, SegmenterKind, SplitSpec,
};
use paracorp::preprocess::{paragraph_count_report, train_truecaser, FilterRules, TruecaseModel};
use paracorp::sbd::{sbd_diff_report, train_punkt, AbbrevList, EnSegmenter, PunktModel};
use paracorp::scoring::{corpus_bleu, sentence_bleu, tokenize, BleuConfig};

#[derive(Parser)]
#[command(name = "paracorp", version, about = "Build sentence-aligned parallel corpora from paired documents")]
struct Cli {
    /// Pipeline config (TOML); stage commands take their defaults from it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads, 0 for one per core
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Reserved: no stage is stochastic
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = LogFormat::Text)]
    log_format: LogFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gc,
    Moore,
    Bleualign,
}

impl From<MethodArg> for AlignMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gc => AlignMethod::Gc,
            MethodArg::Moore => AlignMethod::Moore,
            MethodArg::Bleualign => AlignMethod::Bleualign,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SegmenterArg {
    Rules,
    Punkt,
}

#[derive(Clone, Copy, ValueEnum)]
enum LangArg {
    Zh,
    En,
}

impl From<LangArg> for Lang {
    fn from(l: LangArg) -> Self {
        match l {
            LangArg::Zh => Lang::Zh,
            LangArg::En => Lang::En,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a document directory and report its article pairs
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Write the complete pairs here in canonical form
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Normalize, stitch and filter documents
    Preprocess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Boilerplate rules replacing the built-in list
        #[arg(long)]
        patterns: Option<PathBuf>,
    },
    /// Split documents into sentences
    Sbd(SbdArgs),
    /// Align the sentences of one document pair
    Align(AlignArgs),
    /// Remove repeated pairs from a bitext TSV
    Dedup {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = LangArg::Zh)]
        src_lang: LangArg,
        #[arg(long, value_enum, default_value_t = LangArg::En)]
        tgt_lang: LangArg,
    },
    /// Assign articles to train/dev/test from a CSV of `id,date,pairs`
    Split {
        #[arg(long)]
        articles: PathBuf,
        /// Manifest TSV `article<TAB>split`; stdout when absent
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        test_target: Option<usize>,
        #[arg(long)]
        dev_target: Option<usize>,
    },
    /// Score an alignment against a gold file, or show the gold bead-type distribution
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: Option<PathBuf>,
        /// Score every bead type instead of 1-1 beads only
        #[arg(long)]
        all_types: bool,
        /// Print the gold bead-type distribution as CSV
        #[arg(long)]
        distribution: bool,
    },
    /// Sentence pairs and token counts of bitext TSV files
    Stats {
        /// Two-column `src<TAB>tgt` files (the file is the article) or
        /// three-column `article<TAB>src<TAB>tgt` files
        #[arg(required = true)]
        bitext: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = LangArg::Zh)]
        src_lang: LangArg,
        #[arg(long, value_enum, default_value_t = LangArg::En)]
        tgt_lang: LangArg,
    },
    /// BLEU of a hypothesis file against a reference file, one sentence per line
    Bleu {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, value_enum, default_value_t = LangArg::En)]
        lang: LangArg,
        /// Also print one sentence-level score per line
        #[arg(long)]
        sentence: bool,
    },
    /// Run every stage end to end (needs --config)
    Run {
        /// Override the aligner named in the config
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Override the output directory named in the config
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SbdArgs {
    /// Preprocessed document directory
    #[arg(long)]
    input: PathBuf,
    /// Receives `<doc id>.tsv` sentence files and `sbd_diff.csv`
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    segmenter: Option<SegmenterArg>,
    /// Abbreviation list for the rule-based segmenter
    #[arg(long)]
    abbrevs: Option<PathBuf>,
    /// Use a saved Punkt model instead of training on the input
    #[arg(long)]
    punkt_model: Option<PathBuf>,
    /// Save the trained Punkt model
    #[arg(long)]
    save_punkt: Option<PathBuf>,
    /// Truecase English sentence starts with this model
    #[arg(long)]
    truecase_model: Option<PathBuf>,
}

#[derive(Args)]
struct AlignArgs {
    /// Source sentence file
    #[arg(long)]
    src: PathBuf,
    /// Target sentence file
    #[arg(long)]
    tgt: PathBuf,
    /// Alignment TSV to write
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Source sentences translated into the target language, one per line
    #[arg(long)]
    src_mt: Option<PathBuf>,
    /// Target sentences translated into the source language (bidirectional Bleualign)
    #[arg(long)]
    tgt_mt: Option<PathBuf>,
    /// Gale-Church `key = value` parameter file
    #[arg(long)]
    length_params: Option<PathBuf>,
    /// Also write the aligned sentence pairs as a TSV
    #[arg(long)]
    bitext: Option<PathBuf>,
}

fn init_logging(format: LogFormat) {
    let mut builder = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"));
    if let LogFormat::Json = format {
        builder.format(|buf, record| {
            let line = serde_json::json!({
                "level": record.level().to_string(),
                "target": record.target(),
                "message": record.args().to_string(),
            });
            writeln!(buf, "{line}")
        });
    }
    builder.init();
}

fn load_config(path: Option<&Path>) -> Result<Option<PipelineConfig>> {
    path.map(|p| PipelineConfig::load(p).with_context(|| format!("loading config {}", p.display())))
        .transpose()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_bitext(path: &Path) -> Result<Vec<BitextRow>> {
    let article = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut rows = Vec::new();
    for (n, line) in read_lines(path)?.iter().enumerate() {
        let cols: Vec<&str> = line.split('\t').collect();
        let row = match cols.as_slice() {
            [s, t] => BitextRow {
                article: article.clone(),
                src: s.to_string(),
                tgt: t.to_string(),
            },
            [a, s, t] => BitextRow {
                article: a.to_string(),
                src: s.to_string(),
                tgt: t.to_string(),
            },
            _ => bail!("{}:{}: expected 2 or 3 tab-separated columns", path.display(), n + 1),
        };
        rows.push(row);
    }
    Ok(rows)
}

fn bitext_tsv(rows: &[BitextRow]) -> String {
    rows.iter().map(|r| format!("{}\t{}\n", r.src, r.tgt)).collect()
}

fn ingest(input: &Path, output: Option<&Path>) -> Result<()> {
    let docs = read_documents(input)?;
    let n = docs.len();
    let (pairs, unpaired) = pair_documents(docs, (Lang::Zh, Lang::En));
    for id in &unpaired {
        warn!("pair `{id}` is missing one side");
    }
    if let Some(out) = output {
        let docs: Vec<Document> = pairs.iter().flat_map(|p| [p.src.clone(), p.tgt.clone()]).collect();
        write_documents(out, &docs)?;
    }
    let summary = serde_json::json!({ "documents": n, "pairs": pairs.len(), "unpaired": unpaired });
    println!("{summary}");
    Ok(())
}

fn load_pairs(input: &Path) -> Result<Vec<DocPair>> {
    let (pairs, unpaired) = pair_documents(read_documents(input)?, (Lang::Zh, Lang::En));
    for id in &unpaired {
        warn!("pair `{id}` is missing one side; skipped");
    }
    if pairs.is_empty() {
        bail!("no complete document pairs in {}", input.display());
    }
    Ok(pairs)
}

fn preprocess(input: &Path, output: &Path, patterns: Option<&Path>) -> Result<()> {
    let pairs = load_pairs(input)?;
    let rules = match patterns {
        Some(p) => FilterRules::load(p)?,
        None => FilterRules::defaults(),
    };
    let (clean, events) = preprocess_corpus(&pairs, &rules);
    let docs: Vec<Document> = clean.iter().flat_map(|p| [p.src.clone(), p.tgt.clone()]).collect();
    write_documents(output, &docs)?;

    let tuples = |ps: &[DocPair]| ps.iter().map(|p| (p.src.clone(), p.tgt.clone())).collect::<Vec<_>>();
    let (_, csv) = paragraph_count_report(&tuples(&pairs), &tuples(&clean))?;
    write_text(&output.join("paragraph_counts.csv"), &csv)?;
    let log: String = events
        .iter()
        .map(|e| serde_json::to_string(e).map(|s| s + "\n"))
        .collect::<Result<_, _>>()?;
    write_text(&output.join("preprocess_log.jsonl"), &log)?;
    let english: Vec<Document> = docs.iter().filter(|d| d.lang() == Lang::En).cloned().collect();
    write_text(&output.join("truecase.tsv"), &train_truecaser(&english).to_tsv())?;
    info!("{} pairs preprocessed, {} log events", clean.len(), events.len());
    Ok(())
}

fn sbd(args: &SbdArgs, cfg: Option<&PipelineConfig>) -> Result<()> {
    let pairs = load_pairs(&args.input)?;
    let kind = match (args.segmenter, cfg) {
        (Some(SegmenterArg::Rules), _) => SegmenterKind::Rules,
        (Some(SegmenterArg::Punkt), _) => SegmenterKind::Punkt,
        (None, Some(c)) => c.sbd.segmenter,
        (None, None) => SegmenterKind::Rules,
    };
    let en = match kind {
        SegmenterKind::Rules => {
            let path = args.abbrevs.clone().or_else(|| cfg.and_then(|c| c.paths.abbrevs.clone()));
            EnSegmenter::Rules(match path {
                Some(p) => AbbrevList::load(p)?,
                None => AbbrevList::defaults(),
            })
        }
        SegmenterKind::Punkt => {
            let model = match &args.punkt_model {
                Some(p) => PunktModel::load(p)?,
                None => {
                    let english: Vec<Document> =
                        pairs.iter().flat_map(|p| [&p.src, &p.tgt]).filter(|d| d.lang() == Lang::En).cloned().collect();
                    train_punkt(&english)
                }
            };
            if let Some(p) = &args.save_punkt {
                write_text(p, &model.to_tsv())?;
            }
            EnSegmenter::Punkt(model)
        }
    };
    let truecaser = match &args.truecase_model {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(TruecaseModel::from_tsv(&text, p)?)
        }
        None => None,
    };
    let lists = segment_corpus(&pairs, &en, truecaser.as_ref());
    let mut zh = Vec::new();
    let mut en_counts = Vec::new();
    for (p, (s, t)) in pairs.iter().zip(&lists) {
        for list in [s, t] {
            write_sentences(args.output.join(format!("{}.tsv", list.doc_id)), list)?;
            let counts = if list.lang == Lang::Zh { &mut zh } else { &mut en_counts };
            counts.push((p.pair_id.clone(), list.len()));
        }
    }
    let report = sbd_diff_report(&zh, &en_counts)?;
    write_text(&args.output.join("sbd_diff.csv"), &report.to_csv()?)?;
    info!(
        "{} documents segmented; median |#zh - #en| = {}",
        lists.len() * 2,
        report.median_abs_diff()
    );
    Ok(())
}

/// Paragraph-level text pairs of one sentence-split document pair.
fn paragraph_texts(src: &SentenceList, tgt: &SentenceList) -> Vec<(String, String)> {
    let join = |l: &SentenceList, r: std::ops::Range<usize>| l.joined(&r.collect::<Vec<_>>());
    let (sp, tp) = (src.paragraph_ranges(), tgt.paragraph_ranges());
    if sp.len() == tp.len() && !sp.is_empty() {
        sp.into_iter().zip(tp).map(|(a, b)| (join(src, a), join(tgt, b))).collect()
    } else {
        vec![(join(src, 0..src.len()), join(tgt, 0..tgt.len()))]
    }
}

fn align(args: &AlignArgs, cfg: Option<&PipelineConfig>) -> Result<()> {
    let src = read_sentences(&args.src)?;
    let tgt = read_sentences(&args.tgt)?;
    let method: AlignMethod = match (args.method, cfg) {
        (Some(m), _) => m.into(),
        (None, Some(c)) => c.align.method,
        (None, None) => AlignMethod::Moore,
    };
    let params_path = args.length_params.clone().or_else(|| cfg.and_then(|c| c.paths.length_params.clone()));
    let length = || -> Result<LengthParams> {
        Ok(match &params_path {
            Some(p) => LengthParams::load(p)?,
            None => estimate_length_params(&paragraph_texts(&src, &tgt))?,
        })
    };
    let set: AlignmentSet = match method {
        AlignMethod::Gc => gc_align_by_paragraph(&src, &tgt, &length()?)?,
        AlignMethod::Moore => {
            let moore = cfg.map(|c| c.align.moore()).unwrap_or_default();
            let (mut sets, _) = moore_align_corpus(&[(src.clone(), tgt.clone())], &moore)?;
            sets.remove(0)
        }
        AlignMethod::Bleualign => {
            let Some(src_mt) = &args.src_mt else {
                bail!("--method bleualign needs --src-mt");
            };
            let read_mt = |p: &Path, lang: Lang| -> Result<SentenceList> {
                let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                Ok(SentenceList::from_sentences(id, lang, read_lines(p)?))
            };
            let s_mt = read_mt(src_mt, tgt.lang)?;
            let t_mt = args.tgt_mt.as_deref().map(|p| read_mt(p, src.lang)).transpose()?;
            let bcfg = BleualignConfig {
                bleu: cfg.map(|c| c.bleu).unwrap_or_default(),
                min_score: cfg.map_or(0.0, |c| c.align.min_score),
                length: length()?,
            };
            bleualign(&src, &tgt, &s_mt, t_mt.as_ref(), &bcfg)?
        }
    };
    write_alignments(&set, &args.output)?;
    if let Some(path) = &args.bitext {
        write_text(path, &bitext_tsv(&bitext_rows(&src.doc_id, &src, &tgt, &set)))?;
    }
    info!("{} beads written to {}", set.len(), args.output.display());
    Ok(())
}

fn dedup(input: &Path, output: &Path, langs: (Lang, Lang)) -> Result<()> {
    let rows = read_bitext(input)?;
    let pairs: Vec<(&str, &str)> = rows.iter().map(|r| (r.src.as_str(), r.tgt.as_str())).collect();
    let (kept, removed) = dedup_pairs(&pairs, langs);
    let text: String = kept.iter().map(|(s, t)| format!("{s}\t{t}\n")).collect();
    write_text(output, &text)?;
    println!("{}", serde_json::json!({ "input": rows.len(), "output": kept.len(), "removed": removed }));
    Ok(())
}

fn split(articles: &Path, output: Option<&Path>, spec: SplitSpec) -> Result<()> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(articles)
        .with_context(|| format!("reading {}", articles.display()))?;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).map(str::trim).unwrap_or("");
        let date = field(1)
            .parse()
            .with_context(|| format!("{}: bad date `{}` for `{}`", articles.display(), field(1), field(0)))?;
        let pairs: usize = field(2)
            .parse()
            .with_context(|| format!("{}: bad pair count for `{}`", articles.display(), field(0)))?;
        let meta = ArticleMeta {
            id: field(0).to_string(),
            pair_id: field(0).to_string(),
            language: Lang::En,
            date,
            article_type: String::new(),
        };
        rows.push((meta, pairs));
    }
    let assignment = split_corpus(&rows, &spec)?;
    let text: String = rows
        .iter()
        .map(|(m, _)| format!("{}\t{}\n", m.id, assignment[&m.id]))
        .collect();
    match output {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for s in assignment.values() {
        *counts.entry(s.to_string()).or_default() += 1;
    }
    info!("articles per split: {counts:?}");
    Ok(())
}

fn eval(gold: &Path, pred: Option<&Path>, all_types: bool, distribution: bool) -> Result<()> {
    let gold = read_gold(gold)?;
    if distribution || pred.is_none() {
        print!("{}", distribution_csv(&alignment_type_distribution(&gold)));
    }
    if let Some(p) = pred {
        let pred = read_alignments(p)?;
        let prf = prf1(&pred, &gold, !all_types)?;
        println!(
            "{}",
            serde_json::json!({ "precision": prf.precision, "recall": prf.recall, "f1": prf.f1 })
        );
    }
    Ok(())
}

fn stats(files: &[PathBuf], langs: (Lang, Lang)) -> Result<()> {
    let mut rows = Vec::new();
    for f in files {
        rows.extend(read_bitext(f)?);
    }
    println!("{}", serde_json::to_string_pretty(&corpus_stats(&rows, langs))?);
    Ok(())
}

fn bleu(hyp: &Path, reference: &Path, lang: Lang, per_sentence: bool, cfg: BleuConfig) -> Result<()> {
    let hyps: Vec<Vec<String>> = read_lines(hyp)?.iter().map(|l| tokenize(l, lang)).collect();
    let refs: Vec<Vec<String>> = read_lines(reference)?.iter().map(|l| tokenize(l, lang)).collect();
    if per_sentence {
        if hyps.len() != refs.len() {
            bail!("{} hypotheses but {} references", hyps.len(), refs.len());
        }
        for (h, r) in hyps.iter().zip(&refs) {
            println!("{:.6}", sentence_bleu(h, r, &cfg));
        }
    }
    println!("BLEU = {:.6}", corpus_bleu(&hyps, &refs, &cfg)?);
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    init_logging(cli.log_format);
    if let Some(seed) = cli.seed {
        info!("seed {seed} accepted; no stage draws random numbers");
    }
    if cli.jobs > 0 && !matches!(cli.command, Command::Run { .. }) {
        std::env::set_var("RAYON_NUM_THREADS", cli.jobs.to_string());
    }
    let cfg = load_config(cli.config.as_deref())?;
    let cfg = cfg.as_ref();

    match &cli.command {
        Command::Ingest { input, output } => ingest(input, output.as_deref()),
        Command::Preprocess { input, output, patterns } => {
            let patterns = patterns.clone().or_else(|| cfg.and_then(|c| c.paths.patterns.clone()));
            preprocess(input, output, patterns.as_deref())
        }
        Command::Sbd(args) => sbd(args, cfg),
        Command::Align(args) => align(args, cfg),
        Command::Dedup {
            input,
            output,
            src_lang,
            tgt_lang,
        } => dedup(input, output, ((*src_lang).into(), (*tgt_lang).into())),
        Command::Split {
            articles,
            output,
            test_target,
            dev_target,
        } => {
            let mut spec = cfg.map(|c| c.split).unwrap_or_default();
            if let Some(n) = test_target {
                spec.test_sentence_target = *n;
            }
            if let Some(n) = dev_target {
                spec.dev_sentence_target = *n;
            }
            split(articles, output.as_deref(), spec)
        }
        Command::Eval {
            gold,
            pred,
            all_types,
            distribution,
        } => eval(gold, pred.as_deref(), *all_types, *distribution),
        Command::Stats {
            bitext,
            src_lang,
            tgt_lang,
        } => stats(bitext, ((*src_lang).into(), (*tgt_lang).into())),
        Command::Bleu {
            hyp,
            reference,
            lang,
            sentence,
        } => bleu(hyp, reference, (*lang).into(), *sentence, cfg.map(|c| c.bleu).unwrap_or_default()),
        Command::Run { method, output } => {
            let Some(cfg) = cfg else {
                bail!("`run` needs --config");
            };
            let mut cfg = cfg.clone();
            if let Some(m) = method {
                cfg.align.method = (*m).into();
            }
            if let Some(o) = output {
                cfg.paths.output = o.clone();
            }
            let summary = run_pipeline(&cfg, cli.jobs)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
    }
}
