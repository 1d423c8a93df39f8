use chrono::NaiveDate;
use proptest::prelude::*;

use paracorp::model::{
    read_alignments, read_documents, read_gold, read_sentences, validate_alignment, write_alignments,
    write_documents, write_gold, write_sentences, AlignmentSet, ArticleMeta, Bead, BeadType, Document,
    GoldAlignment, Lang, SentenceList,
};

fn text() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 甲乙丙。，.,!?\"()-]{1,24}".prop_filter("not blank", |s| !s.trim().is_empty())
}

fn lang() -> impl Strategy<Value = Lang> {
    prop_oneof![Just(Lang::Zh), Just(Lang::En)]
}

/// A valid alignment built from a random sequence of allowed bead shapes.
fn alignment() -> impl Strategy<Value = AlignmentSet> {
    let shape = prop::sample::select(BeadType::ALLOWED.to_vec());
    let score = prop_oneof![Just(None), (-50.0f64..50.0).prop_map(Some)];
    prop::collection::vec((shape, score, "[a-z]{1,6}"), 0..25).prop_map(|beads| {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        for (ty, score, method) in beads {
            out.push(Bead::new((i..i + ty.src).collect(), (j..j + ty.tgt).collect(), score, method));
            i += ty.src;
            j += ty.tgt;
        }
        AlignmentSet::with_beads(out, i, j)
    })
}

proptest! {
    #[test]
    fn sentence_files_round_trip(
        id in "[a-z0-9_]{1,8}",
        lang in lang(),
        rows in prop::collection::vec((text(), 0usize..5), 0..20),
    ) {
        let mut list = SentenceList::new(id, lang);
        for (s, p) in rows {
            list.push(s, p);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.tsv");
        write_sentences(&path, &list).unwrap();
        prop_assert_eq!(read_sentences(&path).unwrap(), list);
    }

    #[test]
    fn alignment_files_round_trip(set in alignment()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.tsv");
        write_alignments(&set, &path).unwrap();
        prop_assert_eq!(read_alignments(&path).unwrap(), set);
    }

    #[test]
    fn gold_files_round_trip(set in alignment(), note_seed in prop::collection::vec(prop::option::of("[a-z ]{1,10}"), 25)) {
        let notes = note_seed.into_iter().take(set.beads.len()).collect();
        let gold = GoldAlignment { alignment: set, notes };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        write_gold(&gold, &path).unwrap();
        let back = read_gold(&path).unwrap();
        prop_assert!(back.validate().is_empty());
        prop_assert_eq!(back, gold);
    }

    #[test]
    fn document_directories_round_trip(
        docs in prop::collection::vec((lang(), 0i64..3000, prop::collection::vec(text(), 0..6)), 1..6),
    ) {
        let docs: Vec<Document> = docs
            .into_iter()
            .enumerate()
            .map(|(k, (language, day, paragraphs))| Document {
                meta: ArticleMeta {
                    id: format!("d{k}"),
                    pair_id: format!("p{k}"),
                    language,
                    date: NaiveDate::from_ymd_opt(2015, 1, 1).unwrap() + chrono::Duration::days(day),
                    article_type: "Original Article".into(),
                },
                paragraphs,
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        write_documents(dir.path(), &docs).unwrap();
        prop_assert_eq!(read_documents(dir.path()).unwrap(), docs);
    }

    #[test]
    fn generated_alignments_are_valid(set in alignment()) {
        prop_assert!(validate_alignment(&set).is_empty());
        prop_assert!(GoldAlignment::new(set).validate().is_empty());
    }

    #[test]
    fn swapping_two_indices_is_caught(set in alignment(), pick in any::<(prop::sample::Index, prop::sample::Index)>(), src_side in any::<bool>()) {
        let side = |b: &Bead| if src_side { b.src.clone() } else { b.tgt.clone() };
        let holders: Vec<usize> = (0..set.beads.len()).filter(|&k| !side(&set.beads[k]).is_empty()).collect();
        prop_assume!(holders.len() >= 2);
        let a = pick.0.index(holders.len());
        let b = pick.1.index(holders.len());
        prop_assume!(a != b);
        let (k, l) = (holders[a.min(b)], holders[a.max(b)]);
        let mut broken = set.clone();
        let (x, y) = (side(&set.beads[k])[0], side(&set.beads[l])[0]);
        if src_side {
            broken.beads[k].src[0] = y;
            broken.beads[l].src[0] = x;
        } else {
            broken.beads[k].tgt[0] = y;
            broken.beads[l].tgt[0] = x;
        }
        prop_assert!(!validate_alignment(&broken).is_empty());
    }
}

#[test]
fn gold_fixture_counts_by_type() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/gold_types.tsv");
    let gold = read_gold(path).unwrap();
    let mut counts = std::collections::BTreeMap::new();
    for b in gold.beads() {
        *counts.entry(b.bead_type().to_string()).or_insert(0) += 1;
    }
    let want: std::collections::BTreeMap<String, i32> =
        [("1-1", 964), ("1-2", 17), ("2-1", 15), ("0-1", 10), ("1-0", 11), ("2-2", 1), ("2-3", 1)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
    assert_eq!(counts, want);
}

#[test]
fn missing_document_body_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("meta.jsonl"),
        r#"{"id":"x-zh","pair_id":"x","language":"zh","date":"2020-01-01","article_type":"t"}"#,
    )
    .unwrap();
    let err = read_documents(dir.path()).unwrap_err().to_string();
    assert!(err.contains("x-zh.txt"), "{err}");
}
