//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use paracorp::align::{
    bleualign, estimate_length_params, find_anchors, gc_align, gc_cost, std_normal_cdf, BleualignConfig,
    Ibm1Trainer, LengthParams, ScoreMatrix, MOVES,
};
use paracorp::eval::{aligner_report, alignment_type_distribution, EvalConfig, EvalDoc, Method};
use paracorp::model::{read_documents, read_gold, read_lines, read_sentences, Document, Lang, SentenceList};
use paracorp::pipeline::{dedup_pairs, run_pipeline, PipelineConfig, RUN_LOG};
use paracorp::sbd::{
    sbd_diff_report, segment_en_rules, segment_punkt, segment_zh, train_punkt, AbbrevList, PunktModel,
};
use paracorp::scoring::{sentence_bleu, BleuConfig};

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// 1. Gale-Church against exhaustive enumeration

/// Minimum path cost by enumerating every bead sequence, summing costs in
/// path order exactly as a forward dynamic program does.
fn enumerate_min(i: usize, j: usize, src: &[usize], tgt: &[usize], acc: f64, p: &LengthParams, best: &mut f64) {
    if i == src.len() && j == tgt.len() {
        if acc < *best {
            *best = acc;
        }
        return;
    }
    for ty in MOVES {
        if i + ty.src > src.len() || j + ty.tgt > tgt.len() {
            continue;
        }
        let s: usize = src[i..i + ty.src].iter().sum();
        let t: usize = tgt[j..j + ty.tgt].iter().sum();
        let c = gc_cost(ty, s, t, p).expect("default bead types have priors");
        enumerate_min(i + ty.src, j + ty.tgt, src, tgt, acc + c, p, best);
    }
}

fn sentences_of_lengths(lang: Lang, lens: &[usize]) -> SentenceList {
    SentenceList::from_sentences("d", lang, lens.iter().map(|&n| "x".repeat(n)))
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut gc_time = 0.0;
    let start = Instant::now();
    for k in 0..200 {
        let n = rng.gen_range(0..=6);
        let m = rng.gen_range(if n == 0 { 1 } else { 0 }..=6);
        let src: Vec<usize> = (0..n).map(|_| rng.gen_range(0..80)).collect();
        let tgt: Vec<usize> = (0..m).map(|_| rng.gen_range(0..80)).collect();
        let params = LengthParams {
            c: rng.gen_range(0.5..3.0),
            s2: rng.gen_range(1.0..10.0),
            ..LengthParams::default()
        };
        let t = Instant::now();
        let set = gc_align(&sentences_of_lengths(Lang::Zh, &src), &sentences_of_lengths(Lang::En, &tgt), &params)
            .map_err(|e| e.to_string())?;
        gc_time += t.elapsed().as_secs_f64();
        let total = set.beads.iter().fold(0.0, |acc, b| acc + -b.score.expect("scored"));
        let mut best = f64::INFINITY;
        enumerate_min(0, 0, &src, &tgt, 0.0, &params, &mut best);
        check(total == best, || format!("instance {k}: dp {total} vs enumeration {best}"))?;
    }
    check(gc_time < 10.0, || format!("aligner took {gc_time:.2} s"))?;
    Ok(format!(
        "200 instances exact; aligner {:.3} s, with enumeration {:.2} s",
        gc_time,
        start.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------------------
// 2. Normal CDF

fn criterion_2() -> Outcome {
    // reference values of the standard normal CDF to 16 digits
    let table = [
        (0.0, 0.5),
        (0.5, 0.691_462_461_274_013_1),
        (1.0, 0.841_344_746_068_542_9),
        (1.2127, 0.887_377_730_077_022),
        (2.0, 0.977_249_868_051_820_8),
        (3.0, 0.998_650_101_968_369_9),
    ];
    check(std_normal_cdf(0.0) == 0.5, || format!("phi(0) = {}", std_normal_cdf(0.0)))?;
    let mut worst: f64 = 0.0;
    for (x, want) in table {
        let err = (std_normal_cdf(x) - want).abs();
        check(err <= 1.5e-7, || format!("phi({x}) off by {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("max abs error {worst:.2e}"))
}

// ---------------------------------------------------------------------------
// 3. IBM Model 1

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut min_gain = f64::INFINITY;
    for c in 0..50 {
        let vocab_s = rng.gen_range(2..=6);
        let vocab_t = rng.gen_range(2..=6);
        let pairs: Vec<(Vec<String>, Vec<String>)> = (0..rng.gen_range(2..=8))
            .map(|_| {
                let s = (0..rng.gen_range(1..=5)).map(|_| format!("s{}", rng.gen_range(0..vocab_s))).collect();
                let t = (0..rng.gen_range(1..=5)).map(|_| format!("t{}", rng.gen_range(0..vocab_t))).collect();
                (s, t)
            })
            .collect();
        let mut trainer = Ibm1Trainer::new(&pairs).map_err(|e| e.to_string())?;
        let mut prev = trainer.log_likelihood();
        for it in 0..10 {
            trainer.step();
            let ll = trainer.log_likelihood();
            check(ll >= prev - 1e-9, || format!("corpus {c}, iteration {it}: {prev} -> {ll}"))?;
            min_gain = min_gain.min(ll - prev);
            prev = ll;
        }
    }
    let two = vec![
        (vec!["a".to_string(), "b".to_string()], vec!["x".to_string(), "y".to_string()]),
        (vec!["a".to_string()], vec!["x".to_string()]),
    ];
    let mut trainer = Ibm1Trainer::new(&two).map_err(|e| e.to_string())?;
    for _ in 0..4 {
        trainer.step();
    }
    let best = trainer.table().best("a").map(|(w, p)| (w.to_string(), p));
    check(best.as_ref().is_some_and(|(w, _)| w == "x"), || format!("argmax t(.|a) = {best:?}"))?;
    Ok(format!(
        "50 corpora monotone (smallest step {min_gain:.2e}); t(x|a) = {:.4}",
        best.expect("checked").1
    ))
}

// ---------------------------------------------------------------------------
// 4. BLEU

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

fn criterion_4() -> Outcome {
    let cfg = BleuConfig::default();
    let hand = sentence_bleu(&words("a b c d"), &words("a b c e"), &cfg);
    check((hand - 0.5f64.sqrt()).abs() <= 1e-9, || format!("hand example {hand}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let vocab: Vec<String> = (0..8).map(|i| format!("w{i}")).collect();
    let draw = |rng: &mut ChaCha8Rng, lo: usize| -> Vec<String> {
        (0..rng.gen_range(lo..=12)).map(|_| vocab.choose(rng).expect("nonempty").clone()).collect()
    };
    for _ in 0..200 {
        let x = draw(&mut rng, 1);
        let s = sentence_bleu(&x, &x, &cfg);
        check(s == 1.0, || format!("identity {x:?} scored {s}"))?;
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..1000 {
        let h = draw(&mut rng, 0);
        let r = draw(&mut rng, 0);
        let s = sentence_bleu(&h, &r, &cfg);
        check((0.0..=1.0).contains(&s), || format!("{h:?} vs {r:?} scored {s}"))?;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok(format!("hand example {hand:.12}; identity 1.0; 1000 random in [{lo:.4}, {hi:.4}]"))
}

// ---------------------------------------------------------------------------
// 5. Bleualign subset and anchor search

/// Best chain by the anchor ordering: total, then summed diagonal deviation,
/// then starting cell.
fn brute_anchors(m: &ScoreMatrix) -> (f64, u64, Option<(usize, usize)>) {
    let cells: Vec<(usize, usize)> = (0..m.rows)
        .flat_map(|i| (0..m.cols).map(move |j| (i, j)))
        .filter(|&(i, j)| m.get(i, j) > 0.0)
        .collect();
    let dev = |i: usize, j: usize| ((i * m.cols) as u64).abs_diff((j * m.rows) as u64);
    let mut best: (f64, u64, Option<(usize, usize)>) = (0.0, 0, None);
    fn walk(
        chain: &mut Vec<(usize, usize)>,
        from: usize,
        cells: &[(usize, usize)],
        m: &ScoreMatrix,
        dev: &dyn Fn(usize, usize) -> u64,
        best: &mut (f64, u64, Option<(usize, usize)>),
    ) {
        if let Some(&first) = chain.first() {
            let total: f64 = chain.iter().rev().map(|&(i, j)| m.get(i, j)).sum();
            let d: u64 = chain.iter().map(|&(i, j)| dev(i, j)).sum();
            let better = match best.2 {
                None => true,
                Some(s) => total > best.0 || (total == best.0 && (d < best.1 || (d == best.1 && first < s))),
            };
            if better {
                *best = (total, d, Some(first));
            }
        }
        for k in from..cells.len() {
            let (i, j) = cells[k];
            if chain.last().is_none_or(|&(pi, pj)| i > pi && j > pj) {
                chain.push((i, j));
                walk(chain, k + 1, cells, m, dev, best);
                chain.pop();
            }
        }
    }
    walk(&mut Vec::new(), 0, &cells, m, &dev, &mut best);
    best
}

const HAN: &str = "甲乙丙丁戊己庚辛壬癸子丑寅卯辰巳午未申酉";

fn random_pair(rng: &mut ChaCha8Rng) -> (SentenceList, SentenceList, SentenceList, SentenceList) {
    let han: Vec<char> = HAN.chars().collect();
    let n = rng.gen_range(1..=12);
    let m = rng.gen_range(1..=12);
    let content = |rng: &mut ChaCha8Rng| -> Vec<usize> { (0..rng.gen_range(1..=8)).map(|_| rng.gen_range(0..20)).collect() };
    let zh_of = |ids: &[usize]| format!("{}。", ids.iter().map(|&i| han[i]).collect::<String>());
    let en_of = |ids: &[usize]| format!("{}.", ids.iter().map(|i| format!("w{i}")).collect::<Vec<_>>().join(" "));
    let noisy = |rng: &mut ChaCha8Rng, ids: &[usize]| -> Vec<usize> {
        ids.iter().map(|&i| if rng.gen_bool(0.7) { i } else { rng.gen_range(0..20) }).collect()
    };
    let src_ids: Vec<Vec<usize>> = (0..n).map(|_| content(rng)).collect();
    let tgt_ids: Vec<Vec<usize>> = (0..m)
        .map(|j| if j < n && rng.gen_bool(0.7) { src_ids[j].clone() } else { content(rng) })
        .collect();
    let src = SentenceList::from_sentences("s", Lang::Zh, src_ids.iter().map(|c| zh_of(c)));
    let tgt = SentenceList::from_sentences("t", Lang::En, tgt_ids.iter().map(|c| en_of(c)));
    let src_mt = SentenceList::from_sentences("s", Lang::En, src_ids.iter().map(|c| en_of(&noisy(rng, c))));
    let tgt_mt = SentenceList::from_sentences("t", Lang::Zh, tgt_ids.iter().map(|c| zh_of(&noisy(rng, c))));
    (src, tgt, src_mt, tgt_mt)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = BleualignConfig::default();
    let (mut uni_beads, mut bi_beads) = (0, 0);
    for k in 0..100 {
        let (src, tgt, src_mt, tgt_mt) = random_pair(&mut rng);
        let uni = bleualign(&src, &tgt, &src_mt, None, &cfg).map_err(|e| e.to_string())?;
        let bi = bleualign(&src, &tgt, &src_mt, Some(&tgt_mt), &cfg).map_err(|e| e.to_string())?;
        for b in &bi.beads {
            check(uni.contains_link(b), || format!("fixture {k}: bi bead {:?}->{:?} not in uni", b.src, b.tgt))?;
        }
        uni_beads += uni.len();
        bi_beads += bi.len();
    }
    for k in 0..300 {
        let r = rng.gen_range(1..=6);
        let c = rng.gen_range(1..=6);
        // multiples of 1/8 add exactly, so totals compare without rounding
        let m = ScoreMatrix::from_fn(r, c, |_, _| if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(1..=8) as f64 / 8.0 });
        let got = find_anchors(&m, 0.0);
        let total: f64 = got.iter().rev().map(|&(i, j)| m.get(i, j)).sum();
        let dev: u64 = got
            .iter()
            .map(|&(i, j)| ((i * m.cols) as u64).abs_diff((j * m.rows) as u64))
            .sum();
        let monotone = got.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
        let want = brute_anchors(&m);
        check(
            monotone && (total, dev, got.first().copied()) == want,
            || format!("matrix {k} ({r}x{c}): got {got:?} total {total} dev {dev}, brute force {want:?}"),
        )?;
    }
    Ok(format!(
        "100 fixtures, {bi_beads} bi beads all among {uni_beads} uni beads; 300 anchor searches match brute force"
    ))
}

// ---------------------------------------------------------------------------
// 6. Gold distribution

fn criterion_6() -> Outcome {
    let gold = read_gold(fixtures().join("gold_types.tsv")).map_err(|e| e.to_string())?;
    check(gold.validate().is_empty(), || "gold file violates alignment rules".into())?;
    let dist = alignment_type_distribution(&gold);
    let got: Vec<(String, usize, String)> =
        dist.iter().map(|r| (r.ty.to_string(), r.count, format!("{:.1}", r.percent))).collect();
    let want: Vec<(String, usize, String)> = [
        ("0-1", 10, "1.0"),
        ("1-0", 11, "1.1"),
        ("1-1", 964, "94.6"),
        ("1-2", 17, "1.7"),
        ("2-1", 15, "1.5"),
        ("2-2", 1, "0.1"),
        ("2-3", 1, "0.1"),
    ]
    .iter()
    .map(|&(t, n, p)| (t.to_string(), n, p.to_string()))
    .collect();
    check(got == want, || format!("distribution {got:?}"))?;
    let total: usize = dist.iter().map(|r| r.count).sum();
    check(total == 1019, || format!("total {total}"))?;
    Ok(format!("1-1 = {} ({}%), total {total}", got[2].1, got[2].2))
}

// ---------------------------------------------------------------------------
// 7. Aligner comparison

#[derive(serde::Deserialize)]
struct Thresholds {
    mt_grade: String,
    max_seconds: f64,
}

fn paragraph_texts(src: &SentenceList, tgt: &SentenceList) -> Vec<(String, String)> {
    let join = |l: &SentenceList, r: std::ops::Range<usize>| l.joined(&r.collect::<Vec<_>>());
    src.paragraph_ranges()
        .into_iter()
        .zip(tgt.paragraph_ranges())
        .map(|(a, b)| (join(src, a), join(tgt, b)))
        .collect()
}

fn load_aligner_fixture(grade: &str) -> Result<Vec<EvalDoc>, String> {
    let dir = fixtures().join("aligner");
    let mut docs = Vec::new();
    for k in 1..=12 {
        let id = format!("doc{k:02}");
        let load = || -> paracorp::Result<EvalDoc> {
            let src = read_sentences(dir.join(format!("{id}.zh.tsv")))?;
            let tgt = read_sentences(dir.join(format!("{id}.en.tsv")))?;
            let mt = |name: &str, lang| -> paracorp::Result<SentenceList> {
                let lines = read_lines(dir.join(format!("mt/{grade}/{id}.{name}.txt")))?;
                Ok(SentenceList::from_sentences(id.clone(), lang, lines))
            };
            Ok(EvalDoc {
                src_mt: Some(mt("zh2en", Lang::En)?),
                tgt_mt: Some(mt("en2zh", Lang::Zh)?),
                gold: read_gold(dir.join(format!("{id}.gold.tsv")))?,
                src,
                tgt,
            })
        };
        docs.push(load().map_err(|e| e.to_string())?);
    }
    Ok(docs)
}

fn criterion_7() -> Outcome {
    let dir = fixtures().join("aligner");
    let text = fs::read_to_string(dir.join("thresholds.toml")).map_err(|e| e.to_string())?;
    let th: Thresholds = toml::from_str(&text).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let docs = load_aligner_fixture(&th.mt_grade)?;
    let training: Vec<(String, String)> = docs.iter().flat_map(|d| paragraph_texts(&d.src, &d.tgt)).collect();
    let length = estimate_length_params(&training).map_err(|e| e.to_string())?;
    let cfg = EvalConfig {
        length,
        ..EvalConfig::default()
    };
    let rows = aligner_report(&docs, &Method::ALL, &cfg).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let by: BTreeMap<&str, (f64, f64, f64)> =
        rows.iter().map(|r| (r.method.name(), (r.precision, r.recall, r.f1))).collect();
    let summary = rows
        .iter()
        .map(|r| format!("{} P={:.3} R={:.3} F1={:.3}", r.method, r.precision, r.recall, r.f1))
        .collect::<Vec<_>>()
        .join("; ");
    let (gc, moore, uni, bi) = (by["gc"], by["moore"], by["bleualign-uni"], by["bleualign-bi"]);
    check(moore.2 >= uni.2, || format!("F1(moore) < F1(bleualign-uni): {summary}"))?;
    check(uni.2 >= gc.2, || format!("F1(bleualign-uni) < F1(gc): {summary}"))?;
    check(bi.0 >= uni.0, || format!("precision(bi) < precision(uni): {summary}"))?;
    check(bi.1 <= uni.1, || format!("recall(bi) > recall(uni): {summary}"))?;
    check(secs < th.max_seconds, || format!("took {secs:.1} s"))?;
    Ok(format!("{summary} ({secs:.1} s)"))
}

// ---------------------------------------------------------------------------
// 8. Segmenter comparison

fn sbd_docs() -> Result<Vec<Document>, String> {
    read_documents(fixtures().join("sbd_citations")).map_err(|e| e.to_string())
}

fn criterion_8() -> Outcome {
    let docs = sbd_docs()?;
    let english: Vec<Document> = docs.iter().filter(|d| d.lang() == Lang::En).cloned().collect();
    let punkt = train_punkt(&english);
    let abbrevs = AbbrevList::defaults();
    let count = |d: &Document, f: &dyn Fn(&str) -> Vec<String>| -> usize {
        d.paragraphs.iter().map(|p| f(p).len()).sum()
    };
    let mut zh = Vec::new();
    let mut rules = Vec::new();
    let mut pk = Vec::new();
    for d in &docs {
        let id = d.meta.pair_id.clone();
        match d.lang() {
            Lang::Zh => zh.push((id, count(d, &|p| segment_zh(p)))),
            Lang::En => {
                rules.push((id.clone(), count(d, &|p| segment_en_rules(p, &abbrevs))));
                pk.push((id, count(d, &|p| segment_punkt(p, &punkt))));
            }
        }
    }
    let r = sbd_diff_report(&zh, &rules).map_err(|e| e.to_string())?;
    let p = sbd_diff_report(&zh, &pk).map_err(|e| e.to_string())?;
    let (mr, mp) = (r.median_abs_diff(), p.median_abs_diff());
    check(mr <= mp, || format!("median |diff| rules {mr} > punkt {mp}"))?;
    Ok(format!("median |#zh - #en|: rules {mr}, punkt {mp} over {} articles", zh.len()))
}

// ---------------------------------------------------------------------------
// 9. Lossless segmentation

fn random_paragraph(rng: &mut ChaCha8Rng, zh: bool) -> String {
    let pieces: &[&str] = if zh {
        &["甲", "乙", "丙", "。", "！", "？", "”", "」", "）", "12", "¹²", " ", "，", "a", ".", "1-3", "（", "\n"]
    } else {
        &[
            "word", "Word", "et al", "Dr", "e.g", "J", ".", "?", "!", " ", "  ", "\t", "\"", "'", "(", ")", "12",
            "12-14", "3.5", ",", "Funded", "“", "”", "NCT01358877",
        ]
    };
    let n = rng.gen_range(0..40);
    let mut s: String = (0..n).map(|_| *pieces.choose(rng).expect("nonempty")).collect();
    s = s.replace('\n', " ");
    s
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let abbrevs = AbbrevList::defaults();
    let docs = sbd_docs()?;
    let english: Vec<Document> = docs.iter().filter(|d| d.lang() == Lang::En).cloned().collect();
    let punkt = train_punkt(&english);
    let empty = PunktModel::default();
    let mut corpus: Vec<(Lang, String)> = Vec::new();
    for _ in 0..1000 {
        let zh = rng.gen_bool(0.5);
        let lang = if zh { Lang::Zh } else { Lang::En };
        corpus.push((lang, random_paragraph(&mut rng, zh)));
    }
    let mut fixture_docs = docs;
    fixture_docs.extend(read_documents(fixtures().join("corpus12/docs")).map_err(|e| e.to_string())?);
    for d in &fixture_docs {
        corpus.extend(d.paragraphs.iter().map(|p| (d.lang(), p.clone())));
    }
    let mut checked = 0;
    for (lang, p) in &corpus {
        let outputs = match lang {
            Lang::Zh => vec![segment_zh(p)],
            Lang::En => vec![segment_en_rules(p, &abbrevs), segment_punkt(p, &punkt), segment_punkt(p, &empty)],
        };
        for out in outputs {
            let joined = lang.join(&out);
            check(joined == p.trim(), || format!("{lang} paragraph {p:?} rejoined as {joined:?}"))?;
            checked += 1;
        }
    }

    let citation = "No replicated loci with genomewide significance have been reported.12-14 To overcome sample-size limitations, we pooled data.";
    let got = segment_en_rules(citation, &abbrevs);
    check(
        got == [
            "No replicated loci with genomewide significance have been reported.12-14",
            "To overcome sample-size limitations, we pooled data.",
        ],
        || format!("citation case split as {got:?}"),
    )?;
    let paren_en = "Diarrhea was more common with pertuzumab than with placebo. (Funded by F. Hoffmann–La Roche; APHINITY ClinicalTrials.gov number, NCT01358877.).";
    let got = segment_en_rules(paren_en, &abbrevs);
    check(got == [paren_en], || format!("parenthesis case split as {got:?}"))?;
    let paren_zh = "与安慰剂组相比，腹泻在帕妥珠单抗组较为常见（由霍夫曼-罗氏公司资助；APHINITY在ClinicalTrials.gov注册号为NCT01358877）。";
    let got = segment_zh(paren_zh);
    check(got == [paren_zh], || format!("Chinese parenthesis case split as {got:?}"))?;
    Ok(format!("{checked} segmentations lossless; citation and parenthesis cases as documented"))
}

// ---------------------------------------------------------------------------
// 10. Pipeline determinism

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).expect("output directory readable") {
            let path = entry.expect("directory entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).expect("under root").to_path_buf();
                out.insert(rel, fs::read(&path).expect("output file readable"));
            }
        }
    }
    out
}

fn tsv_pairs(bytes: &[u8]) -> Vec<(String, String)> {
    String::from_utf8_lossy(bytes)
        .lines()
        .map(|l| {
            let (s, t) = l.split_once('\t').expect("two columns");
            (s.to_string(), t.to_string())
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let base = fixtures().join("corpus12");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for jobs in [1, 8] {
        let mut cfg = PipelineConfig::load(base.join("pipeline.toml")).map_err(|e| e.to_string())?;
        cfg.paths.output = tmp.path().join(format!("jobs{jobs}"));
        run_pipeline(&cfg, jobs).map_err(|e| e.to_string())?;
        let mut files = files_under(&cfg.paths.output);
        check(files.remove(Path::new(RUN_LOG)).is_some(), || "run log missing".into())?;
        outputs.push(files);
    }
    check(outputs[0].keys().eq(outputs[1].keys()), || "different file sets".into())?;
    for (path, bytes) in &outputs[0] {
        check(outputs[1][path] == *bytes, || format!("{} differs between --jobs 1 and 8", path.display()))?;
    }
    let files = &outputs[0];

    let bitext = tsv_pairs(&files[Path::new("bitext.tsv")]);
    let (once, removed) = dedup_pairs(&bitext, (Lang::Zh, Lang::En));
    check(removed == 0 && once == bitext, || format!("dedup of the output removed {removed} more"))?;
    let (twice, _) = dedup_pairs(&once, (Lang::Zh, Lang::En));
    check(twice == once, || "dedup not idempotent".into())?;

    let manifest = String::from_utf8_lossy(&files[Path::new("splits/manifest.tsv")]).into_owned();
    let mut assigned: BTreeMap<String, (String, usize)> = BTreeMap::new();
    for line in manifest.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        let prev = assigned.insert(cols[0].to_string(), (cols[1].to_string(), cols[2].parse().expect("count")));
        check(prev.is_none(), || format!("article {} listed twice", cols[0]))?;
    }
    let articles: Vec<String> = (1..=12).map(|k| format!("a{k:02}")).collect();
    check(assigned.keys().cloned().collect::<Vec<_>>() == articles, || "manifest does not cover all articles".into())?;

    // rebuild each split from the per-article pair counts, in corpus order
    let mut offset = 0;
    let mut expected: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    for a in &articles {
        let (split, n) = &assigned[a];
        expected.entry(split.clone()).or_default().extend(bitext[offset..offset + n].iter().cloned());
        offset += n;
    }
    check(offset == bitext.len(), || format!("manifest counts {offset} pairs, bitext has {}", bitext.len()))?;
    let mut per_split = Vec::new();
    for split in ["train", "dev", "test"] {
        let got = tsv_pairs(&files[Path::new(&format!("splits/{split}.tsv"))]);
        let want = expected.remove(split).unwrap_or_default();
        check(got == want, || format!("{split} split holds pairs of other articles"))?;
        let n_articles = assigned.values().filter(|(s, _)| s == split).count();
        per_split.push(format!("{split} {n_articles} articles/{} pairs", got.len()));
    }
    Ok(format!(
        "{} files identical across --jobs 1 and 8; {} pairs; {}",
        files.len(),
        bitext.len(),
        per_split.join(", ")
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 Gale-Church equals exhaustive minimum", criterion_1),
        ("2 normal CDF accuracy", criterion_2),
        ("3 IBM Model 1 EM", criterion_3),
        ("4 sentence BLEU", criterion_4),
        ("5 Bleualign subset and anchors", criterion_5),
        ("6 gold bead-type distribution", criterion_6),
        ("7 aligner ranking", criterion_7),
        ("8 segmenter sentence-count gap", criterion_8),
        ("9 lossless segmentation", criterion_9),
        ("10 pipeline determinism", criterion_10),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} [{secs:.2} s]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} [{secs:.2} s]: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
