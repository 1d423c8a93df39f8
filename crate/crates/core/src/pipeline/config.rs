use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::split::SplitSpec;
use crate::align::MooreConfig;
use crate::model::Lang;
use crate::scoring::BleuConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignMethod {
    Gc,
    Moore,
    Bleualign,
}

impl AlignMethod {
    pub fn name(self) -> &'static str {
        match self {
            AlignMethod::Gc => "gc",
            AlignMethod::Moore => "moore",
            AlignMethod::Bleualign => "bleualign",
        }
    }
}

impl std::str::FromStr for AlignMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gc" => Ok(AlignMethod::Gc),
            "moore" => Ok(AlignMethod::Moore),
            "bleualign" => Ok(AlignMethod::Bleualign),
            _ => Err(Error::InvalidParameter(format!("unknown aligner `{s}` (expected gc, moore or bleualign)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmenterKind {
    Rules,
    Punkt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HashKind {
    #[serde(rename = "fnv1a-64")]
    Fnv1a64,
}

impl HashKind {
    pub fn name(self) -> &'static str {
        match self {
            HashKind::Fnv1a64 => "fnv1a-64",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// Document directory (`meta.jsonl` plus one text file per document).
    pub input: PathBuf,
    pub output: PathBuf,
    /// Boilerplate rules; the built-in list when absent.
    #[serde(default)]
    pub patterns: Option<PathBuf>,
    /// Abbreviation list for the rule-based English segmenter.
    #[serde(default)]
    pub abbrevs: Option<PathBuf>,
    /// Gale-Church parameters (`key = value` file); estimated from the
    /// corpus when absent.
    #[serde(default)]
    pub length_params: Option<PathBuf>,
    /// Directory with one `<source doc id>.txt` per document: the machine
    /// translation of each source sentence, one per line.
    #[serde(default)]
    pub src_mt: Option<PathBuf>,
    /// Same for target sentences translated into the source language.
    /// Turns on bidirectional Bleualign.
    #[serde(default)]
    pub tgt_mt: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignSection {
    pub method: AlignMethod,
    pub theta1: f64,
    pub theta2: f64,
    pub iterations: usize,
    /// Bleualign anchor floor.
    pub min_score: f64,
}

impl Default for AlignSection {
    fn default() -> Self {
        let m = MooreConfig::default();
        AlignSection {
            method: AlignMethod::Moore,
            theta1: m.theta1,
            theta2: m.theta2,
            iterations: m.iterations,
            min_score: 0.0,
        }
    }
}

impl AlignSection {
    pub fn moore(&self) -> MooreConfig {
        MooreConfig {
            theta1: self.theta1,
            theta2: self.theta2,
            iterations: self.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessSection {
    /// Restore the casing of sentence-initial English words.
    pub truecase: bool,
}

impl Default for PreprocessSection {
    fn default() -> Self {
        PreprocessSection { truecase: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SbdSection {
    pub segmenter: SegmenterKind,
}

impl Default for SbdSection {
    fn default() -> Self {
        SbdSection {
            segmenter: SegmenterKind::Rules,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DedupSection {
    pub hash: HashKind,
}

impl Default for DedupSection {
    fn default() -> Self {
        DedupSection { hash: HashKind::Fnv1a64 }
    }
}

/// Everything an end-to-end run needs, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_src_lang")]
    pub source_lang: Lang,
    #[serde(default = "default_tgt_lang")]
    pub target_lang: Lang,
    pub paths: Paths,
    #[serde(default)]
    pub preprocess: PreprocessSection,
    #[serde(default)]
    pub sbd: SbdSection,
    #[serde(default)]
    pub align: AlignSection,
    #[serde(default)]
    pub bleu: BleuConfig,
    #[serde(default)]
    pub dedup: DedupSection,
    #[serde(default)]
    pub split: SplitSpec,
}

fn default_src_lang() -> Lang {
    Lang::Zh
}

fn default_tgt_lang() -> Lang {
    Lang::En
}

impl PipelineConfig {
    /// A config with default settings for the given directories.
    pub fn new(input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            source_lang: default_src_lang(),
            target_lang: default_tgt_lang(),
            paths: Paths {
                input: input.into(),
                output: output.into(),
                patterns: None,
                abbrevs: None,
                length_params: None,
                src_mt: None,
                tgt_mt: None,
            },
            preprocess: PreprocessSection::default(),
            sbd: SbdSection::default(),
            align: AlignSection::default(),
            bleu: BleuConfig::default(),
            dedup: DedupSection::default(),
            split: SplitSpec::default(),
        }
    }

    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            Error::parse(path, line, e.message().to_string())
        })
    }

    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text, path)?;
        if let Some(base) = path.parent() {
            cfg.resolve_relative_to(base);
        }
        Ok(cfg)
    }

    pub fn resolve_relative_to(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let paths = &mut self.paths;
        fix(&mut paths.input);
        fix(&mut paths.output);
        for p in [
            &mut paths.patterns,
            &mut paths.abbrevs,
            &mut paths.length_params,
            &mut paths.src_mt,
            &mut paths.tgt_mt,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks parameter ranges and that every referenced input exists.
    pub fn validate(&self) -> Result<()> {
        if self.source_lang == self.target_lang {
            return Err(Error::InvalidParameter("source and target languages must differ".into()));
        }
        self.bleu.validate()?;
        self.align.moore().validate()?;
        if !(0.0..1.0).contains(&self.align.min_score) {
            return Err(Error::InvalidParameter(format!(
                "min_score must lie in [0, 1), got {}",
                self.align.min_score
            )));
        }
        let p = &self.paths;
        let mut required = vec![&p.input];
        required.extend([&p.patterns, &p.abbrevs, &p.length_params, &p.tgt_mt].into_iter().flatten());
        if self.align.method == AlignMethod::Bleualign {
            match &p.src_mt {
                Some(dir) => required.push(dir),
                None => {
                    return Err(Error::InvalidParameter(
                        "the bleualign aligner needs paths.src_mt, a directory of source translations".into(),
                    ))
                }
            }
        }
        for path in required {
            if !path.exists() {
                return Err(Error::io(
                    path,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "referenced by the config but missing"),
                ));
            }
        }
        Ok(())
    }
}
