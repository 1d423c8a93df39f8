//! Regenerates the test fixtures:
//!
//! ```text
//! cargo run -p paracorp --example gen_fixtures -- crates/core/tests/fixtures
//! ```
//!
//! Everything is drawn from a seeded ChaCha stream, so the output is the same
//! on every run. The "Chinese" and "English" texts are synthetic: a Zipfian
//! vocabulary of random Han-character words paired one to one with invented
//! Latin words. That gives aligners a real lexical signal without shipping
//! copyrighted text.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use paracorp::model::{
    write_documents, write_gold, write_lines, write_sentences, AlignmentSet, ArticleMeta, Bead, BeadType, Document,
    GoldAlignment, Lang, SentenceList,
};
use paracorp::sbd::AbbrevList;

const SEED: u64 = 0x5eed_2020;
const VOCAB: usize = 700;
const EN_FUNCTION: [&str; 10] = ["the", "of", "and", "in", "with", "a", "to", "was", "were", "for"];
const ZH_PARTICLES: [&str; 4] = ["的", "了", "在", "和"];
const NAMES: [(&str, &str); 4] = [("Smith", "史密斯"), ("Chen", "陈"), ("Miller", "米勒"), ("Garcia", "加西亚")];
const MT_GRADES: [(&str, f64); 3] = [("q30", 0.3), ("q60", 0.6), ("q90", 0.9)];

struct Vocab {
    zh: Vec<String>,
    en: Vec<String>,
    cum: Vec<f64>,
}

impl Vocab {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let abbrevs = AbbrevList::defaults();
        let consonants: Vec<char> = "bcdfghklmnprstvz".chars().collect();
        let vowels: Vec<char> = "aeiou".chars().collect();
        let mut seen_zh = HashSet::new();
        let mut seen_en: HashSet<String> = EN_FUNCTION.iter().map(|s| s.to_string()).collect();
        let (mut zh, mut en) = (Vec::new(), Vec::new());
        while zh.len() < VOCAB {
            let n = rng.gen_range(1..=3);
            let w: String = (0..n)
                .map(|_| char::from_u32(0x4E00 + rng.gen_range(0..20000)).expect("Han block"))
                .collect();
            let mut e = String::new();
            for _ in 0..rng.gen_range(2..=3) {
                e.push(*consonants.choose(rng).expect("nonempty"));
                e.push(*vowels.choose(rng).expect("nonempty"));
            }
            if rng.gen_bool(0.4) {
                e.push(*consonants.choose(rng).expect("nonempty"));
            }
            if abbrevs.contains(&e) || seen_en.contains(&e) || seen_zh.contains(&w) {
                continue;
            }
            seen_zh.insert(w.clone());
            seen_en.insert(e.clone());
            zh.push(w);
            en.push(e);
        }
        let mut cum = Vec::with_capacity(VOCAB);
        let mut total = 0.0;
        for r in 0..VOCAB {
            total += 1.0 / (r as f64 + 2.0);
            cum.push(total);
        }
        Vocab { zh, en, cum }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let x = rng.gen::<f64>() * self.cum[VOCAB - 1];
        self.cum.partition_point(|&c| c < x).min(VOCAB - 1)
    }
}

/// Content of one sentence: vocabulary ids plus an optional number token.
#[derive(Clone)]
struct Content {
    ids: Vec<usize>,
    number: Option<(usize, String)>,
}

impl Content {
    fn draw(v: &Vocab, rng: &mut ChaCha8Rng, len: std::ops::RangeInclusive<usize>) -> Self {
        let n = rng.gen_range(len);
        let ids: Vec<usize> = (0..n).map(|_| v.draw(rng)).collect();
        let number = rng.gen_bool(0.2).then(|| {
            let text = if rng.gen_bool(0.3) {
                format!("{}.{}", rng.gen_range(1..40), rng.gen_range(1..10))
            } else {
                rng.gen_range(2..300).to_string()
            };
            (rng.gen_range(1..=n), text)
        });
        Content { ids, number }
    }

    fn concat(&self, other: &Content) -> Content {
        let mut ids = self.ids.clone();
        ids.extend(&other.ids);
        Content {
            ids,
            number: self.number.clone().or_else(|| other.number.clone().map(|(p, t)| (p + self.ids.len(), t))),
        }
    }

    fn split_at(&self, k: usize) -> (Content, Content) {
        let (a, b) = self.ids.split_at(k);
        let (na, nb) = match &self.number {
            Some((p, t)) if *p <= k => (Some((*p, t.clone())), None),
            Some((p, t)) => (None, Some((p - k, t.clone()))),
            None => (None, None),
        };
        (Content { ids: a.to_vec(), number: na }, Content { ids: b.to_vec(), number: nb })
    }
}

/// How a sentence is rendered; these knobs make the two length ratios drift.
struct Style {
    verbosity: f64,
    particles: f64,
}

impl Style {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        Style {
            verbosity: rng.gen_range(0.0..0.9),
            particles: rng.gen_range(0.0..0.5),
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// English words of a sentence, without final punctuation.
fn en_words(c: &Content, v: &Vocab, rng: &mut ChaCha8Rng, style: &Style) -> Vec<String> {
    let mut words: Vec<String> = c.ids.iter().map(|&i| v.en[i].clone()).collect();
    if let Some((p, t)) = &c.number {
        words.insert(*p, t.clone());
    }
    for i in 1..words.len() {
        if rng.gen_bool(0.25) {
            words.swap(i - 1, i);
        }
    }
    let mut out = Vec::new();
    for w in words {
        if rng.gen_bool(style.verbosity) {
            out.push(EN_FUNCTION.choose(rng).expect("nonempty").to_string());
        }
        out.push(w);
    }
    out
}

fn render_en(c: &Content, v: &Vocab, rng: &mut ChaCha8Rng, style: &Style) -> String {
    let words = en_words(c, v, rng, style);
    format!("{}.", capitalize(&words.join(" ")))
}

/// Chinese text of a sentence, without the final full stop.
fn zh_body(c: &Content, v: &Vocab, rng: &mut ChaCha8Rng, style: &Style) -> String {
    let mut out = String::new();
    for (k, &i) in c.ids.iter().enumerate() {
        if let Some((p, t)) = &c.number {
            if *p == k {
                out.push_str(t);
            }
        }
        out.push_str(&v.zh[i]);
        if rng.gen_bool(style.particles) {
            out.push_str(ZH_PARTICLES.choose(rng).expect("nonempty"));
        }
        if k + 1 < c.ids.len() && rng.gen_bool(0.08) {
            out.push('，');
        }
    }
    if let Some((p, t)) = &c.number {
        if *p >= c.ids.len() {
            out.push_str(t);
        }
    }
    out
}

fn render_zh(c: &Content, v: &Vocab, rng: &mut ChaCha8Rng, style: &Style) -> String {
    format!("{}。", zh_body(c, v, rng, style))
}

/// Machine translation of `c` into English: each word survives with
/// probability `q`, otherwise it is dropped or replaced by a random word.
fn mt_en(c: &Content, v: &Vocab, rng: &mut ChaCha8Rng, q: f64) -> String {
    let mut words = Vec::new();
    for (k, &i) in c.ids.iter().enumerate() {
        if let Some((p, t)) = &c.number {
            if *p == k {
                words.push(t.clone());
            }
        }
        if rng.gen_bool(q) {
            words.push(v.en[i].clone());
        } else if rng.gen_bool(0.5) {
            words.push(v.en[v.draw(rng)].clone());
        }
    }
    if let Some((p, t)) = &c.number {
        if *p >= c.ids.len() {
            words.push(t.clone());
        }
    }
    format!("{}.", capitalize(&words.join(" ")))
}

fn mt_zh(c: &Content, v: &Vocab, rng: &mut ChaCha8Rng, q: f64) -> String {
    let mut out = String::new();
    for &i in &c.ids {
        if rng.gen_bool(q) {
            out.push_str(&v.zh[i]);
        } else if rng.gen_bool(0.5) {
            out.push_str(&v.zh[v.draw(rng)]);
        }
    }
    if let Some((_, t)) = &c.number {
        out.push_str(t);
    }
    out.push('。');
    out
}

fn write(path: &Path, text: &str) {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).expect("create fixture directory");
    }
    fs::write(path, text).expect("write fixture");
}

/// Gold file whose bead counts follow the annotated test set: 964 1-1,
/// 17 1-2, 15 2-1, 11 1-0, 10 0-1, one 2-2 and one 2-3, in random order.
fn gold_table(rng: &mut ChaCha8Rng, out: &Path) {
    let counts = [
        (BeadType::ONE_ONE, 964),
        (BeadType::ONE_TWO, 17),
        (BeadType::TWO_ONE, 15),
        (BeadType::ONE_ZERO, 11),
        (BeadType::ZERO_ONE, 10),
        (BeadType::TWO_TWO, 1),
        (BeadType::TWO_THREE, 1),
    ];
    let mut types: Vec<BeadType> = counts.iter().flat_map(|&(t, n)| std::iter::repeat_n(t, n)).collect();
    types.shuffle(rng);
    let (mut i, mut j) = (0, 0);
    let mut beads = Vec::new();
    for t in types {
        beads.push(Bead::new((i..i + t.src).collect(), (j..j + t.tgt).collect(), None, "gold"));
        i += t.src;
        j += t.tgt;
    }
    let gold = GoldAlignment::new(AlignmentSet::with_beads(beads, i, j));
    assert!(gold.validate().is_empty());
    write_gold(&gold, out.join("gold_types.tsv")).expect("write gold");
}

struct AlignedDoc {
    zh: SentenceList,
    en: SentenceList,
    zh_content: Vec<Content>,
    en_content: Vec<Content>,
    gold: GoldAlignment,
}

fn aligned_doc(id: &str, v: &Vocab, rng: &mut ChaCha8Rng, n_beads: usize) -> AlignedDoc {
    let shapes = [
        (BeadType::ONE_ONE, 0.84),
        (BeadType::ONE_ZERO, 0.03),
        (BeadType::ZERO_ONE, 0.03),
        (BeadType::TWO_ONE, 0.045),
        (BeadType::ONE_TWO, 0.045),
        (BeadType::TWO_TWO, 0.01),
    ];
    let mut zh = SentenceList::new(format!("{id}.zh"), Lang::Zh);
    let mut en = SentenceList::new(format!("{id}.en"), Lang::En);
    let (mut zc, mut ec) = (Vec::new(), Vec::new());
    let mut beads = Vec::new();
    let mut para = 0;
    let mut left_in_para = rng.gen_range(3..=8);
    for _ in 0..n_beads {
        let ty = shapes.choose_weighted(rng, |s| s.1).expect("weights").0;
        let style = Style::draw(rng);
        let (zs, es): (Vec<Content>, Vec<Content>) = match (ty.src, ty.tgt) {
            (1, 1) => {
                let c = Content::draw(v, rng, 5..=22);
                (vec![c.clone()], vec![c])
            }
            (1, 0) => (vec![Content::draw(v, rng, 4..=14)], vec![]),
            (0, 1) => (vec![], vec![Content::draw(v, rng, 4..=14)]),
            (2, 1) => {
                let a = Content::draw(v, rng, 4..=12);
                let b = Content::draw(v, rng, 4..=12);
                let joined = a.concat(&b);
                (vec![a, b], vec![joined])
            }
            (1, 2) => {
                let c = Content::draw(v, rng, 10..=26);
                let k = rng.gen_range(4..c.ids.len() - 3);
                let (a, b) = c.split_at(k);
                (vec![c], vec![a, b])
            }
            _ => {
                let a = Content::draw(v, rng, 5..=12);
                let b = Content::draw(v, rng, 8..=14);
                let k = rng.gen_range(2..b.ids.len() - 2);
                let (b1, b2) = b.split_at(k);
                (vec![a.clone(), b], vec![a.concat(&b1), b2])
            }
        };
        let src: Vec<usize> = (zh.len()..zh.len() + zs.len()).collect();
        let tgt: Vec<usize> = (en.len()..en.len() + es.len()).collect();
        for c in zs {
            zh.push(render_zh(&c, v, rng, &style), para);
            zc.push(c);
        }
        for c in es {
            en.push(render_en(&c, v, rng, &style), para);
            ec.push(c);
        }
        beads.push(Bead::new(src, tgt, None, "gold"));
        left_in_para -= 1;
        if left_in_para == 0 {
            para += 1;
            left_in_para = rng.gen_range(3..=8);
        }
    }
    let gold = GoldAlignment::new(AlignmentSet::with_beads(beads, zh.len(), en.len()));
    assert!(gold.validate().is_empty(), "generated gold must be valid");
    AlignedDoc {
        zh,
        en,
        zh_content: zc,
        en_content: ec,
        gold,
    }
}

/// Twelve sentence-split document pairs with gold alignments and machine
/// translations at three quality grades.
fn aligner_fixture(v: &Vocab, rng: &mut ChaCha8Rng, out: &Path) {
    let dir = out.join("aligner");
    for k in 1..=12 {
        let id = format!("doc{k:02}");
        let n = rng.gen_range(75..=95);
        let d = aligned_doc(&id, v, rng, n);
        write_sentences(dir.join(format!("{id}.zh.tsv")), &d.zh).expect("write sentences");
        write_sentences(dir.join(format!("{id}.en.tsv")), &d.en).expect("write sentences");
        write_gold(&d.gold, dir.join(format!("{id}.gold.tsv"))).expect("write gold");
        for (grade, q) in MT_GRADES {
            let zh2en: Vec<String> = d.zh_content.iter().map(|c| mt_en(c, v, rng, q)).collect();
            let en2zh: Vec<String> = d.en_content.iter().map(|c| mt_zh(c, v, rng, q)).collect();
            write_lines(dir.join(format!("mt/{grade}/{id}.zh2en.txt")), &zh2en).expect("write mt");
            write_lines(dir.join(format!("mt/{grade}/{id}.en2zh.txt")), &en2zh).expect("write mt");
        }
    }
    write(
        &dir.join("thresholds.toml"),
        "# Settings for the aligner comparison on this fixture.\n\
         # Required: F1(moore) >= F1(bleualign-uni) >= F1(gc),\n\
         # precision(bleualign-bi) >= precision(bleualign-uni) and recall(bi) <= recall(uni).\n\
         # The comparison uses the best translation grade; see the notes on lower grades.\n\
         mt_grade = \"q90\"\n\
         max_seconds = 30.0\n",
    );
}

/// One article pair as parallel paragraph lists, before boilerplate is added.
struct ArticleText {
    zh: Vec<String>,
    en: Vec<String>,
}

/// Options for [`article_body`].
struct BodyOpts {
    citation_rate: f64,
    fragment_rate: f64,
    link_rate: f64,
    funding: bool,
}

fn citation(rng: &mut ChaCha8Rng) -> String {
    let a = rng.gen_range(1..60);
    match rng.gen_range(0..3) {
        0 => a.to_string(),
        1 => format!("{a}-{}", a + rng.gen_range(1..4)),
        _ => format!("{a},{}", a + rng.gen_range(1..6)),
    }
}

/// Paragraphs of sentences aligned one to one, with citations, names and
/// abbreviations sprinkled in.
fn article_body(v: &Vocab, rng: &mut ChaCha8Rng, paragraphs: usize, opts: &BodyOpts) -> ArticleText {
    let headers = [("背景", "Background"), ("方法", "Methods"), ("结果", "Results"), ("结论", "Conclusions")];
    let mut zh = vec!["摘要".to_string()];
    let mut en = vec!["Abstract".to_string()];
    for p in 0..paragraphs {
        if p < headers.len() {
            zh.push(headers[p].0.into());
            en.push(headers[p].1.into());
        }
        let n = rng.gen_range(2..=6);
        let (mut zs, mut es) = (Vec::new(), Vec::new());
        for s in 0..n {
            let style = Style::draw(rng);
            let c = Content::draw(v, rng, 5..=18);
            let mut ztext = zh_body(&c, v, rng, &style);
            let mut words = en_words(&c, v, rng, &style);
            if rng.gen_bool(0.1) {
                let (ename, zname) = *NAMES.choose(rng).expect("nonempty");
                words.insert(0, format!("{ename} et al."));
                ztext = format!("{zname}等{ztext}");
            }
            let mut etext = format!("{}.", capitalize(&words.join(" ")));
            let last = s + 1 == n;
            if rng.gen_bool(opts.citation_rate) {
                let cite = citation(rng);
                etext.push_str(&cite);
                if last && rng.gen_bool(opts.fragment_rate) {
                    // citation split into its own paragraph by the extractor
                    zs.push(ztext);
                    zh.push(zs.concat());
                    zs.clear();
                    zs.push(format!("{cite}。"));
                    es.push(etext);
                    continue;
                }
                ztext.push_str(&cite);
            }
            if last && opts.funding && p == 3 {
                ztext.push_str("（由霍夫曼-罗氏公司资助；APHINITY在ClinicalTrials.gov注册号为NCT01358877）");
                etext.push_str(" (Funded by F. Hoffmann–La Roche; APHINITY ClinicalTrials.gov number, NCT01358877.).");
                etext = etext.replacen(".. (", ". (", 1);
            }
            ztext.push('。');
            zs.push(ztext);
            es.push(etext);
        }
        zh.push(zs.concat());
        let para = es.join(" ");
        if rng.gen_bool(opts.link_rate) {
            let cut: Vec<usize> = para.match_indices(' ').map(|(i, _)| i).collect();
            let at = cut[cut.len() / 2];
            en.push(para[..at].to_string());
            en.push("Open in New Tab".into());
            en.push(para[at + 1..].to_string());
        } else {
            en.push(para);
        }
    }
    ArticleText { zh, en }
}

fn insert_boilerplate(a: &mut ArticleText, v: &Vocab, rng: &mut ChaCha8Rng, k: usize) {
    let caption_words = |rng: &mut ChaCha8Rng| {
        let c = Content::draw(v, rng, 3..=6);
        let style = Style::draw(rng);
        (zh_body(&c, v, rng, &style), en_words(&c, v, rng, &style).join(" "))
    };
    let (zcap, ecap) = caption_words(rng);
    let at = rng.gen_range(3..a.zh.len());
    a.zh.insert(at, format!("图{}. {zcap}", k % 3 + 1));
    let at = rng.gen_range(3..a.en.len());
    a.en.insert(at, format!("Figure {}. {}.", k % 3 + 1, capitalize(&ecap)));
    a.zh.insert(1, "翻译：王明　审校：李华".into());
    if k.is_multiple_of(2) {
        a.en.insert(2, "Quick Take".into());
        a.en.insert(3, "Video".into());
    } else {
        a.en.insert(2, "Visual Abstract".into());
    }
    if k.is_multiple_of(3) {
        let at = rng.gen_range(4..a.en.len());
        a.en.insert(at, "Interactive Graphic".into());
    }
    a.zh.push("参考文献".into());
    a.en.push("References".into());
    for r in 1..=3 {
        let who = NAMES[(k + r) % NAMES.len()];
        a.zh.push(format!("{}. {} J, {} K. N Engl J Med 2019;380:{}-{}.", r, who.0, who.0, 100 * r, 100 * r + 9));
        a.en.push(format!("{}. {} J, {} K. N Engl J Med 2019;380:{}-{}.", r, who.0, who.0, 100 * r, 100 * r + 9));
    }
}

fn write_corpus(dir: &Path, articles: Vec<ArticleText>, start: NaiveDate) {
    let mut docs = Vec::new();
    for (k, a) in articles.into_iter().enumerate() {
        let pair = format!("a{:02}", k + 1);
        let date = start - Duration::days(17 * k as i64);
        for (lang, paragraphs) in [(Lang::Zh, a.zh), (Lang::En, a.en)] {
            docs.push(Document {
                meta: ArticleMeta {
                    id: format!("{pair}-{}", lang.code()),
                    pair_id: pair.clone(),
                    language: lang,
                    date,
                    article_type: "original-article".into(),
                },
                paragraphs,
            });
        }
    }
    write_documents(dir, &docs).expect("write documents");
}

/// Twelve article pairs with boilerplate, broken paragraphs, citations and
/// repeated section headers, for end-to-end runs.
fn corpus12(v: &Vocab, rng: &mut ChaCha8Rng, out: &Path) {
    let dir = out.join("corpus12");
    let opts = BodyOpts {
        citation_rate: 0.2,
        fragment_rate: 0.3,
        link_rate: 0.1,
        funding: true,
    };
    let articles = (0..12)
        .map(|k| {
            let n = rng.gen_range(6..=10);
            let mut a = article_body(v, rng, n, &opts);
            insert_boilerplate(&mut a, v, rng, k);
            a
        })
        .collect();
    write_corpus(&dir.join("docs"), articles, NaiveDate::from_ymd_opt(2020, 6, 30).expect("valid date"));
    write(
        &dir.join("pipeline.toml"),
        "# End-to-end run over the twelve-article fixture.\n\
         [paths]\n\
         input = \"docs\"\n\
         output = \"out\"\n\n\
         [align]\n\
         method = \"moore\"\n\n\
         [split]\n\
         test_sentence_target = 120\n\
         dev_sentence_target = 120\n",
    );
}

/// Articles dense in citations glued to periods, with one trailing funding
/// parenthetical each, for comparing English segmenters.
fn sbd_fixture(v: &Vocab, rng: &mut ChaCha8Rng, out: &Path) {
    let opts = BodyOpts {
        citation_rate: 0.45,
        fragment_rate: 0.0,
        link_rate: 0.0,
        funding: true,
    };
    let articles = (0..12)
        .map(|_| {
            let n = rng.gen_range(8..=12);
            article_body(v, rng, n, &opts)
        })
        .collect();
    write_corpus(
        &out.join("sbd_citations"),
        articles,
        NaiveDate::from_ymd_opt(2019, 12, 31).expect("valid date"),
    );
}

fn main() {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "crates/core/tests/fixtures".into()).into();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let vocab = Vocab::new(&mut rng);
    gold_table(&mut rng, &out);
    aligner_fixture(&vocab, &mut rng, &out);
    corpus12(&vocab, &mut rng, &out);
    sbd_fixture(&vocab, &mut rng, &out);
    println!("fixtures written to {}", out.display());
}
