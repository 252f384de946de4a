use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize, Serializer};

use crate::bridge::DEFAULT_TIMEOUT;
use crate::compressor::{methods_label, parse_methods, CompressionMethod, Constraints};
use crate::corpus::Split;
use crate::error::{Error, Result};
use crate::rouge::RougeOptions;
use crate::wordgraph::Resources;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SummarizerSpec {
    /// First N sentences of the source.
    Lead(usize),
    /// External worker command, run through `sh -c`.
    Exec(String),
    /// Returns each instance's reference summary; an upper-bound fixture.
    EchoReference,
}

impl fmt::Display for SummarizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SummarizerSpec::Lead(n) => write!(f, "lead:{n}"),
            SummarizerSpec::Exec(cmd) => write!(f, "exec:{cmd}"),
            SummarizerSpec::EchoReference => f.write_str("echo-reference"),
        }
    }
}

impl FromStr for SummarizerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "echo-reference" {
            return Ok(SummarizerSpec::EchoReference);
        }
        if let Some(n) = s.strip_prefix("lead:") {
            return match n.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(SummarizerSpec::Lead(n)),
                _ => Err(Error::Usage(format!(
                    "lead budget must be a positive integer, got `{n}`"
                ))),
            };
        }
        if let Some(cmd) = s.strip_prefix("exec:") {
            if cmd.trim().is_empty() {
                return Err(Error::Usage("exec summarizer needs a command".into()));
            }
            return Ok(SummarizerSpec::Exec(cmd.to_string()));
        }
        Err(Error::Usage(format!(
            "unknown summarizer `{s}` (expected lead:N, exec:COMMAND or echo-reference)"
        )))
    }
}

impl Serialize for SummarizerSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SummarizerSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn serialize_methods<S: Serializer>(
    m: &[CompressionMethod],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&methods_label(m))
}

fn deserialize_methods<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<CompressionMethod>, D::Error> {
    let s = String::deserialize(d)?;
    parse_methods(&s).map_err(serde::de::Error::custom)
}

/// One experiment. Fields that cannot change the results (output location,
/// worker count) are left out of the serialized echo, so reports of the same
/// experiment compare byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub label: String,
    pub corpus_root: PathBuf,
    pub split: Split,
    #[serde(
        serialize_with = "serialize_methods",
        deserialize_with = "deserialize_methods"
    )]
    pub methods: Vec<CompressionMethod>,
    pub prepend_query: bool,
    pub constraints: Constraints,
    pub summarizer: SummarizerSpec,
    pub timeout_secs: u64,
    pub rouge: RougeOptions,
    pub stopwords: Option<PathBuf>,
    pub abbreviations: Option<PathBuf>,
    pub pos_lexicon: Option<PathBuf>,
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            label: "baseline".into(),
            corpus_root: PathBuf::from("."),
            split: Split::Test,
            methods: Vec::new(),
            prepend_query: false,
            constraints: Constraints::default(),
            summarizer: SummarizerSpec::Lead(3),
            timeout_secs: DEFAULT_TIMEOUT.as_secs(),
            rouge: RougeOptions::default(),
            stopwords: None,
            abbreviations: None,
            pos_lexicon: None,
            output_dir: None,
            jobs: None,
        }
    }
}

pub const KEYS: [&str; 18] = [
    "label",
    "corpus_root",
    "split",
    "methods",
    "prepend_query",
    "min_words",
    "require_verb",
    "k_paths",
    "search_budget",
    "summarizer",
    "timeout",
    "rouge_stem",
    "rouge_remove_stopwords",
    "stopwords",
    "abbreviations",
    "pos_lexicon",
    "output_dir",
    "jobs",
];

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Usage(format!(
            "`{key}` expects true or false, got `{value}`"
        ))),
    }
}

fn parse_count(key: &str, value: &str, min: usize) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(n) if n >= min => Ok(n),
        _ => Err(Error::Usage(format!(
            "`{key}` expects an integer ≥ {min}, got `{value}`"
        ))),
    }
}

fn optional_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "label" => self.label = value.to_string(),
            "corpus_root" => self.corpus_root = PathBuf::from(value),
            "split" => self.split = value.parse()?,
            "methods" => self.methods = parse_methods(value)?,
            "prepend_query" => self.prepend_query = parse_bool(key, value)?,
            "min_words" => self.constraints.min_content_length = parse_count(key, value, 0)?,
            "require_verb" => self.constraints.require_verb = parse_bool(key, value)?,
            "k_paths" => self.constraints.search.k = parse_count(key, value, 1)?,
            "search_budget" => self.constraints.search.budget = parse_count(key, value, 1)?,
            "summarizer" => self.summarizer = value.parse()?,
            "timeout" => self.timeout_secs = parse_count(key, value, 1)? as u64,
            "rouge_stem" => self.rouge.stem = parse_bool(key, value)?,
            "rouge_remove_stopwords" => self.rouge.remove_stopwords = parse_bool(key, value)?,
            "stopwords" => self.stopwords = optional_path(value),
            "abbreviations" => self.abbreviations = optional_path(value),
            "pos_lexicon" => self.pos_lexicon = optional_path(value),
            "output_dir" => self.output_dir = optional_path(value),
            "jobs" => self.jobs = Some(parse_count(key, value, 1)?),
            other => {
                return Err(Error::Usage(format!(
                    "unknown configuration key `{other}` (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies a flat `key = value` file on top of `self`. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str, source_name: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let field = format!("line {}", i + 1);
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(source_name, field, "expected `key = value`"));
            };
            self.set(key.trim(), value).map_err(|e| {
                Error::parse(
                    source_name,
                    format!("{field} ({})", key.trim()),
                    e.to_string(),
                )
            })?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = ExperimentConfig::default();
        config.apply_text(&text, &path.display().to_string())?;
        Ok(config)
    }

    /// The configuration as a file `apply_text` reads back.
    pub fn to_text(&self) -> String {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        let lines = [
            ("label", self.label.clone()),
            ("corpus_root", self.corpus_root.display().to_string()),
            ("split", self.split.to_string()),
            ("methods", methods_label(&self.methods)),
            ("prepend_query", self.prepend_query.to_string()),
            ("min_words", self.constraints.min_content_length.to_string()),
            ("require_verb", self.constraints.require_verb.to_string()),
            ("k_paths", self.constraints.search.k.to_string()),
            ("search_budget", self.constraints.search.budget.to_string()),
            ("summarizer", self.summarizer.to_string()),
            ("timeout", self.timeout_secs.to_string()),
            ("rouge_stem", self.rouge.stem.to_string()),
            (
                "rouge_remove_stopwords",
                self.rouge.remove_stopwords.to_string(),
            ),
            ("stopwords", path(&self.stopwords)),
            ("abbreviations", path(&self.abbreviations)),
            ("pos_lexicon", path(&self.pos_lexicon)),
            ("output_dir", path(&self.output_dir)),
            ("jobs", self.jobs.map(|j| j.to_string()).unwrap_or_default()),
        ];
        lines
            .iter()
            .filter(|(k, v)| !(v.is_empty() && *k == "jobs"))
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    pub fn resources(&self) -> Result<Resources> {
        Resources::with_overrides(
            self.stopwords.as_deref(),
            self.abbreviations.as_deref(),
            self.pos_lexicon.as_deref(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summarizer_specs() {
        assert_eq!(
            "lead:3".parse::<SummarizerSpec>().unwrap(),
            SummarizerSpec::Lead(3)
        );
        assert_eq!(
            "exec:python w.py --x".parse::<SummarizerSpec>().unwrap(),
            SummarizerSpec::Exec("python w.py --x".into())
        );
        assert!("lead:0".parse::<SummarizerSpec>().is_err());
        assert!("bart".parse::<SummarizerSpec>().is_err());
        for s in ["lead:2", "exec:cat", "echo-reference"] {
            assert_eq!(s.parse::<SummarizerSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn file_and_overrides() {
        let mut c = ExperimentConfig::default();
        c.apply_text(
            "# comment\nlabel = clustering\nmethods = combined\nprepend_query = yes\nmin_words = 5\n\njobs = 4\n",
            "t.conf",
        )
        .unwrap();
        assert_eq!(c.label, "clustering");
        assert_eq!(c.methods, CompressionMethod::COMBINED);
        assert!(c.prepend_query);
        assert_eq!(c.constraints.min_content_length, 5);
        assert_eq!(c.jobs, Some(4));
        c.set("min_words", "8").unwrap();
        assert_eq!(c.constraints.min_content_length, 8);

        let err = c
            .apply_text("colour = blue", "t.conf")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 1") && err.contains("colour"), "{err}");
        assert!(c.apply_text("no equals sign", "t.conf").is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut c = ExperimentConfig::default();
        c.set("methods", "keyphrase,longest").unwrap();
        c.set("output_dir", "/tmp/x").unwrap();
        c.set("summarizer", "exec:sh -c 'cat'").unwrap();
        let mut back = ExperimentConfig::default();
        back.apply_text(&c.to_text(), "echo").unwrap();
        assert_eq!(back, c);
    }
}
