use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn paracorp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paracorp")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = paracorp(args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Config for the twelve-article fixture with an absolute input path.
fn write_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("pipeline.toml");
    let docs = fixtures().join("corpus12/docs");
    let text = format!(
        "[paths]\ninput = {:?}\noutput = \"out\"\n{extra}\n[split]\ntest_sentence_target = 120\ndev_sentence_target = 120\n",
        s(&docs)
    );
    fs::write(&path, text).unwrap();
    path
}

fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn stages_run_one_after_another() {
    let tmp = tempfile::tempdir().unwrap();
    let t = tmp.path();
    let docs = fixtures().join("corpus12/docs");

    let summary = ok(&["ingest", "--input", s(&docs)]);
    assert!(summary.contains("\"pairs\":12"), "{summary}");

    ok(&["preprocess", "--input", s(&docs), "--output", s(&t.join("clean"))]);
    for f in ["meta.jsonl", "paragraph_counts.csv", "preprocess_log.jsonl", "truecase.tsv"] {
        assert!(t.join("clean").join(f).is_file(), "{f} missing");
    }

    ok(&[
        "sbd",
        "--input",
        s(&t.join("clean")),
        "--output",
        s(&t.join("sent")),
        "--truecase-model",
        s(&t.join("clean/truecase.tsv")),
    ]);
    assert!(t.join("sent/a01-zh.tsv").is_file() && t.join("sent/sbd_diff.csv").is_file());

    for method in ["gc", "moore"] {
        let out = t.join(format!("{method}.tsv"));
        let bitext = t.join(format!("{method}.bitext.tsv"));
        ok(&[
            "align",
            "--src",
            s(&t.join("sent/a01-zh.tsv")),
            "--tgt",
            s(&t.join("sent/a01-en.tsv")),
            "--method",
            method,
            "--output",
            s(&out),
            "--bitext",
            s(&bitext),
        ]);
        assert!(fs::read_to_string(&bitext).unwrap().lines().count() > 5);
    }

    ok(&["dedup", "--input", s(&t.join("moore.bitext.tsv")), "--output", s(&t.join("dedup.tsv"))]);
    let stats = ok(&["stats", s(&t.join("dedup.tsv"))]);
    let v: serde_json::Value = serde_json::from_str(&stats).unwrap();
    assert!(v["sentence_pairs"].as_u64().unwrap() > 0, "{stats}");
}

#[test]
fn bleualign_reads_translation_files() {
    let tmp = tempfile::tempdir().unwrap();
    let a = fixtures().join("aligner");
    let out = tmp.path().join("bi.tsv");
    ok(&[
        "align",
        "--src",
        s(&a.join("doc01.zh.tsv")),
        "--tgt",
        s(&a.join("doc01.en.tsv")),
        "--method",
        "bleualign",
        "--src-mt",
        s(&a.join("mt/q90/doc01.zh2en.txt")),
        "--tgt-mt",
        s(&a.join("mt/q90/doc01.en2zh.txt")),
        "--output",
        s(&out),
    ]);
    let score = ok(&["eval", "--gold", s(&a.join("doc01.gold.tsv")), "--pred", s(&out)]);
    let v: serde_json::Value = serde_json::from_str(&score).unwrap();
    assert!(v["precision"].as_f64().unwrap() > 0.8, "{score}");

    let missing = paracorp(&[
        "align",
        "--src",
        s(&a.join("doc01.zh.tsv")),
        "--tgt",
        s(&a.join("doc01.en.tsv")),
        "--method",
        "bleualign",
        "--output",
        s(&out),
    ]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("--src-mt"));
}

#[test]
fn run_is_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "");
    let mut trees = Vec::new();
    for jobs in ["1", "8"] {
        let out = tmp.path().join(format!("out{jobs}"));
        let summary = ok(&["--config", s(&config), "--jobs", jobs, "run", "--output", s(&out)]);
        assert!(summary.contains("aligned_pairs"), "{summary}");
        let mut tree = read_tree(&out);
        assert!(tree.remove(Path::new("run_log.jsonl")).is_some());
        trees.push(tree);
    }
    assert!(!trees[0].is_empty());
    assert_eq!(trees[0], trees[1]);
}

#[test]
fn run_with_missing_translations_names_the_stage_and_path() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir(tmp.path().join("mt")).unwrap();
    let config = write_config(tmp.path(), "src_mt = \"mt\"\n[align]\nmethod = \"bleualign\"\n");
    let out = paracorp(&["--config", s(&config), "run"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("align") && err.contains("mt/a01") && err.contains(".txt"), "{err}");
    let written = read_tree(&tmp.path().join("out"));
    assert!(written.keys().any(|p| p.to_string_lossy().ends_with(".partial")));
}

#[test]
fn bleualign_run_without_translations_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "");
    let out = paracorp(&["--config", s(&config), "run", "--method", "bleualign"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("src_mt"));
}

#[test]
fn config_errors_point_at_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "bogus = true\n");
    let out = paracorp(&["--config", s(&config), "run"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pipeline.toml:4"), "{err}");
}

#[test]
fn gold_distribution_table() {
    let table = ok(&["eval", "--gold", s(&fixtures().join("gold_types.tsv")), "--distribution"]);
    assert!(table.contains("1-1,964,94.6"), "{table}");
    assert!(table.lines().count() == 8, "{table}");
}

#[test]
fn bleu_of_a_file_against_itself_is_one() {
    let tmp = tempfile::tempdir().unwrap();
    let f = tmp.path().join("h.txt");
    fs::write(&f, "Diarrhea was common.\nThe trial enrolled patients.\n").unwrap();
    let out = ok(&["bleu", "--hyp", s(&f), "--ref", s(&f), "--sentence"]);
    assert_eq!(out, "1.000000\n1.000000\nBLEU = 1.000000\n");
}

#[test]
fn split_assigns_newest_articles_to_test() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("articles.csv");
    fs::write(&csv, "id,date,pairs\nold,2019-01-01,500\nnew,2020-06-01,500\nmid,2019-06-01,500\n").unwrap();
    let out = ok(&["split", "--articles", s(&csv), "--test-target", "400", "--dev-target", "400"]);
    assert_eq!(out, "old\ttrain\nnew\ttest\nmid\tdev\n");
}

#[test]
fn json_logs_are_one_object_per_line() {
    let tmp = tempfile::tempdir().unwrap();
    let out = paracorp(&[
        "--log-format",
        "json",
        "preprocess",
        "--input",
        s(&fixtures().join("corpus12/docs")),
        "--output",
        s(&tmp.path().join("clean")),
    ]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(!err.trim().is_empty());
    for line in err.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap_or_else(|e| panic!("{line}: {e}"));
        assert!(v["level"].is_string());
    }
}
