use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffRow {
    pub article: String,
    pub zh: usize,
    pub en: usize,
    pub diff: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    pub rows: Vec<DiffRow>,
    /// First quartile, median and third quartile of `|diff|`.
    pub abs_diff_quartiles: [f64; 3],
}

impl DiffReport {
    pub fn median_abs_diff(&self) -> f64 {
        self.abs_diff_quartiles[1]
    }

    /// `article,zh,en,diff` rows followed by one summary row per quartile of
    /// `|diff|`, with the value in the `diff` column.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["article", "zh", "en", "diff"])?;
        for r in &self.rows {
            w.write_record([r.article.clone(), r.zh.to_string(), r.en.to_string(), r.diff.to_string()])?;
        }
        for (name, q) in ["summary_abs_diff_q1", "summary_abs_diff_median", "summary_abs_diff_q3"]
            .iter()
            .zip(self.abs_diff_quartiles)
        {
            w.write_record([name.to_string(), String::new(), String::new(), q.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: "<csv buffer>".into(),
            source: e.into_error(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Quartiles by linear interpolation between order statistics; zeros for an
/// empty sample.
pub fn quartiles(values: &[f64]) -> [f64; 3] {
    if values.is_empty() {
        return [0.0; 3];
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |q: f64| {
        let h = q * (v.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    [at(0.25), at(0.5), at(0.75)]
}

/// Per-article sentence count difference (zh minus en), rows ordered by
/// article id.
pub fn sbd_diff_report(zh_counts: &[(String, usize)], en_counts: &[(String, usize)]) -> Result<DiffReport> {
    let zh: BTreeMap<&str, usize> = zh_counts.iter().map(|(a, c)| (a.as_str(), *c)).collect();
    let en: BTreeMap<&str, usize> = en_counts.iter().map(|(a, c)| (a.as_str(), *c)).collect();
    if zh.len() != zh_counts.len() || en.len() != en_counts.len() {
        return Err(Error::Mismatch("an article is listed twice".into()));
    }
    if !zh.keys().eq(en.keys()) {
        let missing: Vec<&str> = zh
            .keys()
            .filter(|k| !en.contains_key(*k))
            .chain(en.keys().filter(|k| !zh.contains_key(*k)))
            .copied()
            .collect();
        return Err(Error::Mismatch(format!("articles present on one side only: {}", missing.join(", "))));
    }
    let rows: Vec<DiffRow> = zh
        .iter()
        .map(|(a, &z)| DiffRow {
            article: a.to_string(),
            zh: z,
            en: en[a],
            diff: z as i64 - en[a] as i64,
        })
        .collect();
    let abs: Vec<f64> = rows.iter().map(|r| r.diff.unsigned_abs() as f64).collect();
    Ok(DiffReport {
        abs_diff_quartiles: quartiles(&abs),
        rows,
    })
}
