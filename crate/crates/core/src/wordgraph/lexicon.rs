//! Bundled language resources: stopwords, non-terminal abbreviations and the
//! part-of-speech lexicon. Each is a plain-text file with one entry per line;
//! `#` starts a comment line. The bundled copies live in `data/` and any of
//! them can be replaced from disk.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
const BUNDLED_ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");
const BUNDLED_POS_LEXICON: &str = include_str!("../../data/pos_lexicon.txt");

static BUNDLED: LazyLock<Resources> = LazyLock::new(|| {
    Resources::from_sources(
        BUNDLED_STOPWORDS,
        BUNDLED_ABBREVIATIONS,
        BUNDLED_POS_LEXICON,
        "bundled pos_lexicon.txt",
    )
    .expect("bundled lexicon is well-formed")
});

/// Coarse universal part-of-speech tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Pron,
    Det,
    Adp,
    Num,
    Conj,
    Prt,
    Punct,
    X,
}

impl Pos {
    pub const ALL: [Pos; 12] = [
        Pos::Noun,
        Pos::Verb,
        Pos::Adj,
        Pos::Adv,
        Pos::Pron,
        Pos::Det,
        Pos::Adp,
        Pos::Num,
        Pos::Conj,
        Pos::Prt,
        Pos::Punct,
        Pos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Pron => "PRON",
            Pos::Det => "DET",
            Pos::Adp => "ADP",
            Pos::Num => "NUM",
            Pos::Conj => "CONJ",
            Pos::Prt => "PRT",
            Pos::Punct => "PUNCT",
            Pos::X => "X",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown tag `{s}`"))
    }
}

#[derive(Debug, Clone)]
pub struct Resources {
    stopwords: HashSet<String>,
    abbreviations: HashSet<String>,
    lexicon: HashMap<String, Pos>,
}

fn entries(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn word_set(text: &str) -> HashSet<String> {
    entries(text).map(|(_, l)| l.to_lowercase()).collect()
}

fn parse_lexicon(text: &str, name: &str) -> Result<HashMap<String, Pos>> {
    let mut lexicon = HashMap::new();
    for (line_no, line) in entries(text) {
        let mut fields = line.split_whitespace();
        let (Some(word), Some(tag), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::parse(
                name,
                format!("line {line_no}"),
                "expected `word<TAB>TAG`",
            ));
        };
        let pos = tag
            .parse::<Pos>()
            .map_err(|e| Error::parse(name, format!("line {line_no}"), e))?;
        lexicon.entry(word.to_lowercase()).or_insert(pos);
    }
    Ok(lexicon)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

impl Resources {
    /// The resources compiled into the crate.
    pub fn bundled() -> &'static Resources {
        &BUNDLED
    }

    pub fn from_sources(
        stopwords: &str,
        abbreviations: &str,
        pos_lexicon: &str,
        lexicon_name: &str,
    ) -> Result<Self> {
        Ok(Resources {
            stopwords: word_set(stopwords),
            abbreviations: word_set(abbreviations),
            lexicon: parse_lexicon(pos_lexicon, lexicon_name)?,
        })
    }

    /// Bundled resources with any of the three files replaced from disk.
    pub fn with_overrides(
        stopwords: Option<&Path>,
        abbreviations: Option<&Path>,
        pos_lexicon: Option<&Path>,
    ) -> Result<Self> {
        let mut res = Resources::bundled().clone();
        if let Some(p) = stopwords {
            res.stopwords = word_set(&read(p)?);
        }
        if let Some(p) = abbreviations {
            res.abbreviations = word_set(&read(p)?);
        }
        if let Some(p) = pos_lexicon {
            res.lexicon = parse_lexicon(&read(p)?, &p.display().to_string())?;
        }
        Ok(res)
    }

    pub fn is_stopword(&self, lower: &str) -> bool {
        self.stopwords.contains(lower)
    }

    /// `word` is compared case-insensitively and without its final period.
    pub fn is_abbreviation(&self, word: &str) -> bool {
        let w = word.strip_suffix('.').unwrap_or(word).to_lowercase();
        self.abbreviations.contains(&w)
    }

    pub fn lexicon_tag(&self, lower: &str) -> Option<Pos> {
        self.lexicon.get(lower).copied()
    }
}
