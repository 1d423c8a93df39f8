use std::fmt;
use std::path::Path;

use regex::Regex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Document, Lang};

/// The pattern file shipped with the crate.
pub const DEFAULT_PATTERNS: &str = include_str!("default_patterns.txt");

#[derive(Debug, Clone)]
pub enum MatchKind {
    /// Regex matched at the start of the paragraph.
    Prefix(Regex),
    /// Whole paragraph, compared after trimming.
    Exact(String),
    /// Regex at the start of the paragraph that opens a trailing section;
    /// the paragraph and all that follow are dropped.
    Section(Regex),
}

#[derive(Debug, Clone)]
pub struct FilterRule {
    /// `None` applies to every language.
    pub lang: Option<Lang>,
    pub kind: MatchKind,
    /// The rule as written in the pattern file.
    pub source: String,
}

impl FilterRule {
    fn applies(&self, lang: Lang) -> bool {
        self.lang.is_none_or(|l| l == lang)
    }

    fn matches(&self, paragraph: &str) -> bool {
        match &self.kind {
            MatchKind::Prefix(re) | MatchKind::Section(re) => re.is_match(paragraph.trim_start()),
            MatchKind::Exact(s) => paragraph.trim() == s,
        }
    }
}

impl fmt::Display for FilterRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[derive(Debug, Clone, Default)]
pub struct FilterRules {
    pub rules: Vec<FilterRule>,
}

fn anchored(pattern: &str) -> Result<Regex> {
    Regex::new(&format!("^(?:{pattern})")).map_err(|source| Error::Pattern {
        pattern: pattern.to_string(),
        source,
    })
}

impl FilterRules {
    pub fn empty() -> Self {
        FilterRules::default()
    }

    /// Parses the pattern file format; `path` is only used in error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut rules = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (tag, body) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(path, n + 1, "expected `zh:`, `en:` or `*:` before the rule"))?;
            let lang = match tag.trim() {
                "*" => None,
                code => Some(
                    code.parse::<Lang>()
                        .map_err(|_| Error::parse(path, n + 1, format!("unknown language prefix `{code}`")))?,
                ),
            };
            if body.is_empty() {
                return Err(Error::parse(path, n + 1, "empty rule"));
            }
            let kind = if let Some(exact) = body.strip_prefix('=') {
                MatchKind::Exact(exact.trim().to_string())
            } else if let Some(section) = body.strip_prefix('>') {
                MatchKind::Section(anchored(section)?)
            } else {
                MatchKind::Prefix(anchored(body)?)
            };
            rules.push(FilterRule {
                lang,
                kind,
                source: line.to_string(),
            });
        }
        Ok(FilterRules { rules })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FilterRules::parse(&text, path)
    }

    pub fn defaults() -> Self {
        FilterRules::parse(DEFAULT_PATTERNS, Path::new("<default patterns>")).expect("bundled patterns are valid")
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// One dropped paragraph: its index in the input and the rule that matched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Removal {
    pub paragraph: usize,
    pub rule: String,
}

/// Drops paragraphs matching any rule for the document's language. The first
/// matching rule is the one logged.
pub fn filter_boilerplate(doc: &Document, rules: &FilterRules) -> (Document, Vec<Removal>) {
    let lang = doc.lang();
    let active: Vec<&FilterRule> = rules.rules.iter().filter(|r| r.applies(lang)).collect();
    let mut kept = Vec::with_capacity(doc.paragraphs.len());
    let mut log = Vec::new();
    let mut section: Option<&FilterRule> = None;
    for (k, p) in doc.paragraphs.iter().enumerate() {
        if let Some(rule) = section {
            log.push(Removal {
                paragraph: k,
                rule: rule.source.clone(),
            });
            continue;
        }
        match active.iter().find(|r| r.matches(p)) {
            Some(rule) => {
                if matches!(rule.kind, MatchKind::Section(_)) {
                    section = Some(rule);
                }
                log.push(Removal {
                    paragraph: k,
                    rule: rule.source.clone(),
                });
            }
            None => kept.push(p.clone()),
        }
    }
    (
        Document {
            meta: doc.meta.clone(),
            paragraphs: kept,
        },
        log,
    )
}
