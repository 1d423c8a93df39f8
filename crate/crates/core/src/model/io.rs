//! On-disk formats.
//!
//! * Documents: a directory holding `meta.jsonl` (one [`ArticleMeta`] record
//!   per line) and `<id>.txt` files with one paragraph per line.
//! * Sentences: `#sentences<TAB>doc_id<TAB>lang` header, then
//!   `paragraph_index<TAB>sentence` per line.
//! * Alignments: optional `#lengths<TAB>src_len<TAB>tgt_len` header, then one
//!   bead per line: `src_indices<TAB>tgt_indices<TAB>score<TAB>method`, indices
//!   comma-joined and 0-based, empty for an empty side, score `NA` when absent.
//!   Gold files may carry a fifth column with an annotator note.
//!
//! All files are UTF-8 with LF line endings.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use super::{AlignmentSet, ArticleMeta, Bead, Document, GoldAlignment, Lang, SentenceList};
use crate::error::{Error, Result};

pub const META_FILE: &str = "meta.jsonl";

fn read_text(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.strip_prefix('\u{feff}').map(str::to_string).unwrap_or(text))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn check_field(path: &Path, line: usize, field: &str) -> Result<()> {
    if field.contains(['\t', '\n', '\r']) {
        return Err(Error::parse(path, line, "field contains a tab or line break"));
    }
    Ok(())
}

/// Reads every document listed in `dir/meta.jsonl`.
pub fn read_documents(dir: impl AsRef<Path>) -> Result<Vec<Document>> {
    let dir = dir.as_ref();
    let meta_path = dir.join(META_FILE);
    let text = read_text(&meta_path)?;
    let mut docs = Vec::new();
    let mut ids = HashSet::new();
    let mut pair_langs: HashMap<String, Vec<Lang>> = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let meta: ArticleMeta = serde_json::from_str(line).map_err(|e| {
            let msg = if e.to_string().contains("unknown language") {
                e.to_string()
            } else {
                format!("expected a JSON record with id, pair_id, language, date, article_type: {e}")
            };
            Error::parse(&meta_path, n + 1, msg)
        })?;
        if !ids.insert(meta.id.clone()) {
            return Err(Error::DuplicateId(meta.id));
        }
        let langs = pair_langs.entry(meta.pair_id.clone()).or_default();
        if langs.contains(&meta.language) {
            return Err(Error::Mismatch(format!(
                "pair `{}` has two `{}` documents",
                meta.pair_id, meta.language
            )));
        }
        langs.push(meta.language);
        let body_path = dir.join(format!("{}.txt", meta.id));
        let body = read_text(&body_path)?;
        let paragraphs = body
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.trim().is_empty())
            .map(str::to_string)
            .collect();
        docs.push(Document { meta, paragraphs });
    }
    Ok(docs)
}

pub fn write_documents(dir: impl AsRef<Path>, docs: &[Document]) -> Result<()> {
    let dir = dir.as_ref();
    let mut meta = String::new();
    for doc in docs {
        meta.push_str(&serde_json::to_string(&doc.meta).expect("metadata serializes"));
        meta.push('\n');
        let path = dir.join(format!("{}.txt", doc.meta.id));
        let mut body = String::new();
        for (i, p) in doc.paragraphs.iter().enumerate() {
            check_field(&path, i + 1, p)?;
            body.push_str(p);
            body.push('\n');
        }
        write_text(&path, &body)?;
    }
    write_text(&dir.join(META_FILE), &meta)
}

pub fn write_sentences(path: impl AsRef<Path>, list: &SentenceList) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("#sentences\t{}\t{}\n", list.doc_id, list.lang);
    for (i, (s, p)) in list.sentences.iter().zip(&list.paragraph_index).enumerate() {
        check_field(path, i + 2, s)?;
        out.push_str(&format!("{p}\t{s}\n"));
    }
    write_text(path, &out)
}

pub fn read_sentences(path: impl AsRef<Path>) -> Result<SentenceList> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .map(|(_, l)| l)
        .ok_or_else(|| Error::parse(path, 1, "missing `#sentences<TAB>doc_id<TAB>lang` header"))?;
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.len() != 3 || fields[0] != "#sentences" {
        return Err(Error::parse(path, 1, "expected `#sentences<TAB>doc_id<TAB>lang` header"));
    }
    let lang: Lang = fields[2].parse()?;
    let mut list = SentenceList::new(fields[1], lang);
    for (n, line) in lines {
        let (p, s) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, n + 1, "expected `paragraph_index<TAB>sentence`"))?;
        let p: usize = p
            .parse()
            .map_err(|_| Error::parse(path, n + 1, "paragraph index is not a non-negative integer"))?;
        if s.trim().is_empty() {
            return Err(Error::parse(path, n + 1, "empty sentence"));
        }
        list.push(s, p);
    }
    Ok(list)
}

/// One text line per entry, e.g. machine translations parallel to a sentence file.
pub fn read_lines(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    Ok(read_text(path)?.lines().map(str::to_string).collect())
}

pub fn write_lines<S: AsRef<str>>(path: impl AsRef<Path>, lines: &[S]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for (i, l) in lines.iter().enumerate() {
        let l = l.as_ref();
        if l.contains(['\n', '\r']) {
            return Err(Error::parse(path, i + 1, "line contains a line break"));
        }
        out.push_str(l);
        out.push('\n');
    }
    write_text(path, &out)
}

fn join_indices(indices: &[usize]) -> String {
    indices.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn format_bead(bead: &Bead) -> String {
    let score = match bead.score {
        Some(s) => s.to_string(),
        None => "NA".to_string(),
    };
    format!(
        "{}\t{}\t{}\t{}",
        join_indices(&bead.src),
        join_indices(&bead.tgt),
        score,
        bead.method
    )
}

fn render(set: &AlignmentSet, notes: Option<&[Option<String>]>, path: &Path) -> Result<String> {
    let mut out = format!("#lengths\t{}\t{}\n", set.src_len, set.tgt_len);
    for (k, bead) in set.beads.iter().enumerate() {
        check_field(path, k + 2, &bead.method)?;
        out.push_str(&format_bead(bead));
        if let Some(Some(note)) = notes.and_then(|n| n.get(k)) {
            check_field(path, k + 2, note)?;
            out.push('\t');
            out.push_str(note);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_alignments(set: &AlignmentSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_text(path, &render(set, None, path)?)
}

pub fn write_gold(gold: &GoldAlignment, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_text(path, &render(&gold.alignment, Some(&gold.notes), path)?)
}

const BEAD_FORMAT: &str = "expected `src_indices<TAB>tgt_indices<TAB>score<TAB>method[<TAB>note]`";

fn parse_indices(field: &str, path: &Path, line: usize) -> Result<Vec<usize>> {
    if field.is_empty() {
        return Ok(Vec::new());
    }
    field
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::parse(path, line, format!("bad index `{x}`; {BEAD_FORMAT}")))
        })
        .collect()
}

fn parse(path: &Path) -> Result<(AlignmentSet, Vec<Option<String>>)> {
    let text = read_text(path)?;
    let mut beads = Vec::new();
    let mut notes = Vec::new();
    let mut lengths = None;
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#lengths\t") {
            let parsed: Option<(usize, usize)> = rest
                .split_once('\t')
                .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)));
            lengths = Some(parsed.ok_or_else(|| {
                Error::parse(path, line_no, "expected `#lengths<TAB>src_len<TAB>tgt_len`")
            })?);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 && fields.len() != 5 {
            return Err(Error::parse(path, line_no, BEAD_FORMAT));
        }
        let src = parse_indices(fields[0], path, line_no)?;
        let tgt = parse_indices(fields[1], path, line_no)?;
        let score = match fields[2] {
            "NA" => None,
            s => Some(s.parse::<f64>().map_err(|_| {
                Error::parse(path, line_no, format!("bad score `{s}`; {BEAD_FORMAT}"))
            })?),
        };
        beads.push(Bead::new(src, tgt, score, fields[3]));
        notes.push(fields.get(4).map(|s| s.to_string()));
    }
    let (src_len, tgt_len) = lengths.unwrap_or_else(|| {
        let next = |f: fn(&Bead) -> &Vec<usize>| {
            beads
                .iter()
                .flat_map(|b| f(b).iter())
                .max()
                .map_or(0, |m| m + 1)
        };
        (next(|b| &b.src), next(|b| &b.tgt))
    });
    Ok((AlignmentSet::with_beads(beads, src_len, tgt_len), notes))
}

/// Reads an alignment file. Without a `#lengths` header the side lengths are
/// taken as one past the largest index used.
pub fn read_alignments(path: impl AsRef<Path>) -> Result<AlignmentSet> {
    Ok(parse(path.as_ref())?.0)
}

pub fn read_gold(path: impl AsRef<Path>) -> Result<GoldAlignment> {
    let (alignment, notes) = parse(path.as_ref())?;
    Ok(GoldAlignment { alignment, notes })
}
