//! Meeting and news corpora.
//!
//! Meetings arrive one JSON document per file under `<root>/train` and
//! `<root>/test`. Every query attached to a meeting becomes its own
//! [`QueryInstance`]; general queries carry no span annotation and cover the
//! whole meeting.

mod meeting;
mod news;
mod synthetic;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::locator::QUESTIONER;

pub use meeting::{parse_meeting_file, write_meeting_file};
pub use news::{
    load_news_dir, news_to_pseudo_meeting, parse_news_story, rank_news_by_relatedness,
    RankedArticle, DEFAULT_PROMPT, DEFAULT_SEGMENT_SIZE,
};
pub use synthetic::{generate as generate_synthetic, write_synthetic_corpus, SyntheticSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::Usage(format!("unknown split `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub index: usize,
    pub speaker: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meeting {
    pub id: String,
    pub turns: Vec<Turn>,
    pub split: Split,
}

/// Inclusive range of turn indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub begin: usize,
    pub end: usize,
}

impl Span {
    pub fn new(begin: usize, end: usize) -> Self {
        Span { begin, end }
    }

    pub fn is_within(&self, turn_count: usize) -> bool {
        self.begin <= self.end && self.end < turn_count
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.begin, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    General,
    Specific,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryInstance {
    pub instance_id: String,
    pub meeting_id: String,
    pub kind: QueryKind,
    pub query: String,
    pub reference: String,
    pub spans: Vec<Span>,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewsArticle {
    pub id: String,
    pub body: Vec<String>,
    pub highlights: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub meeting_count: usize,
    pub train_instance_count: usize,
    pub test_instance_count: usize,
    pub queries_per_meeting: BTreeMap<String, usize>,
}

impl CorpusStats {
    pub fn total_instances(&self) -> usize {
        self.train_instance_count + self.test_instance_count
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub meetings: Vec<Meeting>,
    pub instances: Vec<QueryInstance>,
}

impl Corpus {
    pub fn meeting(&self, id: &str) -> Option<&Meeting> {
        self.meetings.iter().find(|m| m.id == id)
    }

    pub fn instances_in(&self, split: Split) -> impl Iterator<Item = &QueryInstance> {
        self.instances.iter().filter(move |i| i.split == split)
    }

    /// Reads `<root>/train/*.json` and `<root>/test/*.json`. Files are
    /// parsed concurrently and assembled in (split, file name) order.
    pub fn load(root: &Path) -> Result<Corpus> {
        let mut files: Vec<(Split, PathBuf)> = Vec::new();
        let mut any_split = false;
        for split in [Split::Train, Split::Test] {
            let dir = root.join(split.as_str());
            if !dir.is_dir() {
                continue;
            }
            any_split = true;
            let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| Error::io(&dir, e))?
                .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(&dir, e)))
                .collect::<Result<_>>()?;
            paths.retain(|p| p.extension().is_some_and(|x| x == "json"));
            paths.sort();
            files.extend(paths.into_iter().map(|p| (split, p)));
        }
        if !any_split {
            return Err(Error::Validation(format!(
                "{} has neither a train/ nor a test/ directory",
                root.display()
            )));
        }

        let parsed: Vec<(Meeting, Vec<QueryInstance>)> = files
            .par_iter()
            .map(|(split, path)| {
                let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let id = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                parse_meeting_file(&raw, &id, *split)
            })
            .collect::<Result<_>>()?;

        let mut corpus = Corpus::default();
        for (meeting, instances) in parsed {
            corpus.meetings.push(meeting);
            corpus.instances.extend(instances);
        }
        Ok(corpus)
    }
}

/// Checks every corpus invariant and counts instances per split.
pub fn validate_corpus(corpus: &Corpus) -> Result<CorpusStats> {
    let mut stats = CorpusStats {
        meeting_count: corpus.meetings.len(),
        ..CorpusStats::default()
    };
    let mut turn_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for meeting in &corpus.meetings {
        if turn_counts
            .insert(&meeting.id, meeting.turns.len())
            .is_some()
        {
            return Err(Error::Validation(format!(
                "duplicate meeting id `{}`",
                meeting.id
            )));
        }
        for (position, turn) in meeting.turns.iter().enumerate() {
            if turn.index != position {
                return Err(Error::Validation(format!(
                    "meeting `{}`: turn at position {position} has index {}",
                    meeting.id, turn.index
                )));
            }
            if turn.speaker.trim().is_empty() {
                return Err(Error::Validation(format!(
                    "meeting `{}`: turn {position} has an empty speaker",
                    meeting.id
                )));
            }
            if turn.speaker.trim().eq_ignore_ascii_case(QUESTIONER) {
                log::warn!(
                    "meeting `{}`: turn {position} uses the reserved speaker `{QUESTIONER}`",
                    meeting.id
                );
            }
        }
        stats.queries_per_meeting.insert(meeting.id.clone(), 0);
    }

    let mut ids = HashSet::new();
    for instance in &corpus.instances {
        if !ids.insert(instance.instance_id.as_str()) {
            return Err(Error::Validation(format!(
                "duplicate instance id `{}`",
                instance.instance_id
            )));
        }
        let Some(&turns) = turn_counts.get(instance.meeting_id.as_str()) else {
            return Err(Error::Validation(format!(
                "instance `{}` references unknown meeting `{}`",
                instance.instance_id, instance.meeting_id
            )));
        };
        if instance.query.trim().is_empty() || instance.reference.trim().is_empty() {
            return Err(Error::Validation(format!(
                "instance `{}` has an empty query or reference summary",
                instance.instance_id
            )));
        }
        if let Some(span) = instance.spans.iter().find(|s| !s.is_within(turns)) {
            return Err(Error::Validation(format!(
                "instance `{}`: span {span} outside meeting of {turns} turns",
                instance.instance_id
            )));
        }
        match instance.split {
            Split::Train => stats.train_instance_count += 1,
            Split::Test => stats.test_instance_count += 1,
        }
        *stats
            .queries_per_meeting
            .entry(instance.meeting_id.clone())
            .or_default() += 1;
    }
    Ok(stats)
}
