use std::collections::HashSet;

use crate::model::Lang;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Comparison key for one side: digits and punctuation removed, whitespace
/// collapsed, English lowercased.
pub fn dedup_key(text: &str, lang: Lang) -> String {
    let kept: String = text
        .chars()
        .filter(|c| c.is_whitespace() || (c.is_alphanumeric() && !c.is_numeric()))
        .collect();
    let collapsed = kept.split_whitespace().collect::<Vec<_>>().join(" ");
    match lang {
        Lang::En => collapsed.to_lowercase(),
        Lang::Zh => collapsed,
    }
}

/// Hash of a normalized pair.
pub fn pair_hash(src: &str, tgt: &str, langs: (Lang, Lang)) -> u64 {
    let mut bytes = dedup_key(src, langs.0).into_bytes();
    bytes.push(b'\t');
    bytes.extend(dedup_key(tgt, langs.1).bytes());
    fnv1a64(&bytes)
}

/// Indices of the pairs to keep: the first occurrence of every hash, in
/// input order.
pub fn dedup_indices<S: AsRef<str>, T: AsRef<str>>(pairs: &[(S, T)], langs: (Lang, Lang)) -> Vec<usize> {
    let mut seen = HashSet::new();
    pairs
        .iter()
        .enumerate()
        .filter(|(_, (s, t))| seen.insert(pair_hash(s.as_ref(), t.as_ref(), langs)))
        .map(|(i, _)| i)
        .collect()
}

/// Drops repeated pairs, keeping the raw text of each first occurrence.
/// Returns the survivors and how many were removed.
pub fn dedup_pairs<S: AsRef<str>, T: AsRef<str>>(pairs: &[(S, T)], langs: (Lang, Lang)) -> (Vec<(String, String)>, usize) {
    let keep = dedup_indices(pairs, langs);
    let removed = pairs.len() - keep.len();
    let out = keep
        .into_iter()
        .map(|i| (pairs[i].0.as_ref().to_string(), pairs[i].1.as_ref().to_string()))
        .collect();
    (out, removed)
}
