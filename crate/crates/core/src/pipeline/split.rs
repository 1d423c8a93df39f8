use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::ArticleMeta;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Split::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown split `{s}`")))
    }
}

/// Sentence-pair targets for the held-out sets. Articles are taken newest
/// first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub test_sentence_target: usize,
    pub dev_sentence_target: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_sentence_target: 2102,
            dev_sentence_target: 2036,
        }
    }
}

/// Assigns whole articles to train/dev/test.
///
/// Articles are visited by date, newest first (ties by id). Each goes to
/// test while the test set holds fewer pairs than its target, then to dev
/// under the same rule, and the rest to train.
pub fn split_corpus(articles: &[(ArticleMeta, usize)], spec: &SplitSpec) -> Result<BTreeMap<String, Split>> {
    let mut seen = HashSet::new();
    for (meta, _) in articles {
        if !seen.insert(meta.id.as_str()) {
            return Err(Error::DuplicateId(meta.id.clone()));
        }
    }
    let mut order: Vec<&(ArticleMeta, usize)> = articles.iter().collect();
    order.sort_by(|a, b| b.0.date.cmp(&a.0.date).then_with(|| a.0.id.cmp(&b.0.id)));

    let (mut test, mut dev) = (0usize, 0usize);
    let mut out = BTreeMap::new();
    for (meta, pairs) in order {
        let split = if test < spec.test_sentence_target {
            test += pairs;
            Split::Test
        } else if dev < spec.dev_sentence_target {
            dev += pairs;
            Split::Dev
        } else {
            Split::Train
        };
        out.insert(meta.id.clone(), split);
    }
    if test < spec.test_sentence_target {
        log::warn!("test split holds {test} pairs, short of its target {}", spec.test_sentence_target);
    } else if dev < spec.dev_sentence_target {
        log::warn!("dev split holds {dev} pairs, short of its target {}", spec.dev_sentence_target);
    }
    Ok(out)
}
