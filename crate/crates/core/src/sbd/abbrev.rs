use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

/// The abbreviation file shipped with the crate.
pub const DEFAULT_ABBREVIATIONS: &str = include_str!("default_abbrevs.txt");

/// Lowercase abbreviations, stored without their final period. Entries may
/// contain inner periods (`e.g`) or a space (`et al`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AbbrevList {
    entries: BTreeSet<String>,
}

fn canonical(entry: &str) -> String {
    entry.trim().trim_end_matches('.').to_lowercase()
}

impl AbbrevList {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        AbbrevList {
            entries: entries
                .into_iter()
                .map(|e| canonical(e.as_ref()))
                .filter(|e| !e.is_empty())
                .collect(),
        }
    }

    pub fn defaults() -> Self {
        AbbrevList::parse(DEFAULT_ABBREVIATIONS)
    }

    /// One entry per line; `#` starts a comment line.
    pub fn parse(text: &str) -> Self {
        AbbrevList::new(text.lines().filter(|l| !l.trim_start().starts_with('#')))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(AbbrevList::parse(&text))
    }

    pub fn insert(&mut self, entry: &str) {
        let e = canonical(entry);
        if !e.is_empty() {
            self.entries.insert(e);
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains(&canonical(word))
    }

    /// Entries made of several words.
    pub fn phrases(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().filter(|e| e.contains(' ')).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
