//! Utterance compression into a "short meeting script".
//!
//! Each utterance is its own cluster: its sentences are merged into a word
//! graph and one path through the graph replaces the utterance. Paths must
//! carry enough content words (and a verb, by default) to be valid; when no
//! valid path exists the utterance's longest sentence is used instead.

mod degeneracy;
mod keyphrase;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Turn;
use crate::error::{Error, Result};
use crate::locator::SpanSelection;
use crate::wordgraph::{
    lightest_paths_where, split_sentences, tag_sentence, PathCandidate, PathSearch, Resources,
    TaggedSentence, WordGraph,
};

pub use degeneracy::{core_numbers, score_degeneracy, CoreRank};
pub use keyphrase::{rank_keyphrases, score_keyphrase, word_scores, Keyphrase};

pub const DEFAULT_MIN_CONTENT_LENGTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompressionMethod {
    /// Lightest valid path by normalized edge weight.
    Filippova,
    /// Lightest valid path after keyphrase-coverage reranking.
    Keyphrase,
    /// Lightest valid path after CoreRank reranking.
    Degeneracy,
    /// Longest sentence of the utterance; no graph.
    Longest,
}

impl CompressionMethod {
    pub const ALL: [CompressionMethod; 4] = [
        CompressionMethod::Filippova,
        CompressionMethod::Keyphrase,
        CompressionMethod::Degeneracy,
        CompressionMethod::Longest,
    ];

    /// The graph-based methods, in the order their outputs are combined.
    pub const COMBINED: [CompressionMethod; 3] = [
        CompressionMethod::Filippova,
        CompressionMethod::Keyphrase,
        CompressionMethod::Degeneracy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CompressionMethod::Filippova => "filippova",
            CompressionMethod::Keyphrase => "keyphrase",
            CompressionMethod::Degeneracy => "degeneracy",
            CompressionMethod::Longest => "longest",
        }
    }
}

impl fmt::Display for CompressionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompressionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CompressionMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown compression method `{s}`")))
    }
}

/// Parses a comma-separated method list. `combined` expands to the three
/// graph methods; an empty list or `none` means no compression. Repeated
/// methods keep their first position.
pub fn parse_methods(spec: &str) -> Result<Vec<CompressionMethod>> {
    let mut methods = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let expanded: Vec<CompressionMethod> = match item {
            "none" => Vec::new(),
            "combined" => CompressionMethod::COMBINED.to_vec(),
            other => vec![other.parse()?],
        };
        for m in expanded {
            if !methods.contains(&m) {
                methods.push(m);
            }
        }
    }
    Ok(methods)
}

pub fn methods_label(methods: &[CompressionMethod]) -> String {
    if methods.is_empty() {
        "none".to_string()
    } else {
        methods
            .iter()
            .map(|m| m.name())
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    pub min_content_length: usize,
    pub require_verb: bool,
    pub search: PathSearch,
}

impl Default for Constraints {
    fn default() -> Self {
        Constraints {
            min_content_length: DEFAULT_MIN_CONTENT_LENGTH,
            require_verb: true,
            search: PathSearch::default(),
        }
    }
}

impl Constraints {
    pub fn relaxed() -> Self {
        Constraints {
            min_content_length: 1,
            require_verb: false,
            ..Constraints::default()
        }
    }

    pub fn accepts(&self, path: &PathCandidate) -> bool {
        path.content_length >= self.min_content_length && (path.has_verb || !self.require_verb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompressionStatus {
    Compressed,
    FallbackLongest,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionResult {
    pub utterance_index: usize,
    pub method: CompressionMethod,
    pub text: String,
    pub status: CompressionStatus,
}

/// One utterance prepared for compression. The graph, its valid candidate
/// paths, keyphrases and CoreRank are computed on first use and shared by
/// every method.
pub struct UtteranceCluster {
    index: usize,
    sentences: Vec<String>,
    tagged: Vec<TaggedSentence>,
    constraints: Constraints,
    graph: OnceLock<Result<WordGraph, String>>,
    candidates: OnceLock<Result<Vec<PathCandidate>, String>>,
}

impl UtteranceCluster {
    pub fn new(index: usize, text: &str, constraints: Constraints, res: &Resources) -> Self {
        let sentences = split_sentences(text, res);
        let tagged = sentences
            .iter()
            .enumerate()
            .filter_map(|(i, s)| tag_sentence(s, (index, i), res).ok())
            .collect();
        UtteranceCluster {
            index,
            sentences,
            tagged,
            constraints,
            graph: OnceLock::new(),
            candidates: OnceLock::new(),
        }
    }

    pub fn sentences(&self) -> &[String] {
        &self.sentences
    }

    pub fn tagged(&self) -> &[TaggedSentence] {
        &self.tagged
    }

    fn result(
        &self,
        method: CompressionMethod,
        text: String,
        status: CompressionStatus,
    ) -> CompressionResult {
        CompressionResult {
            utterance_index: self.index,
            method,
            text,
            status,
        }
    }

    /// Longest sentence by word count; the earliest wins ties.
    pub fn longest_sentence(&self) -> Option<&str> {
        let mut best: Option<(usize, &TaggedSentence)> = None;
        for sentence in &self.tagged {
            let words = sentence.tokens.iter().filter(|t| !t.is_punct()).count();
            if best.is_none_or(|(w, _)| words > w) {
                best = Some((words, sentence));
            }
        }
        best.map(|(_, s)| self.sentences[s.origin.1].as_str())
    }

    pub fn graph(&self) -> Result<&WordGraph> {
        self.graph
            .get_or_init(|| WordGraph::build(&self.tagged).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Internal(e.clone()))
    }

    /// The `k` lightest paths that satisfy the constraints, best first.
    pub fn valid_candidates(&self) -> Result<&[PathCandidate]> {
        self.candidates
            .get_or_init(|| {
                let graph = self.graph().map_err(|e| e.to_string())?;
                lightest_paths_where(graph, &self.constraints.search, |p| {
                    self.constraints.accepts(p)
                })
                .map_err(|e| e.to_string())
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(|e| Error::Internal(e.clone()))
    }

    pub fn compress(&self, method: CompressionMethod) -> Result<CompressionResult> {
        let Some(longest) = self.longest_sentence() else {
            return Ok(self.result(method, String::new(), CompressionStatus::Empty));
        };
        if method == CompressionMethod::Longest {
            return Ok(self.result(method, longest.to_string(), CompressionStatus::Compressed));
        }
        let candidates = self.valid_candidates()?;
        let chosen = match method {
            CompressionMethod::Filippova => candidates.first(),
            CompressionMethod::Keyphrase => {
                let keyphrases = rank_keyphrases(&self.tagged);
                best_by(candidates, |p| score_keyphrase(p, &keyphrases))
            }
            CompressionMethod::Degeneracy => {
                let core_rank = CoreRank::new(self.graph()?);
                best_by(candidates, |p| core_rank.score(p))
            }
            CompressionMethod::Longest => unreachable!("handled above"),
        };
        Ok(match chosen {
            Some(path) => self.result(method, path.text.clone(), CompressionStatus::Compressed),
            None => self.result(
                method,
                longest.to_string(),
                CompressionStatus::FallbackLongest,
            ),
        })
    }
}

fn best_by<F: Fn(&PathCandidate) -> f64>(
    candidates: &[PathCandidate],
    score: F,
) -> Option<&PathCandidate> {
    candidates
        .iter()
        .map(|p| (score(p), p))
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| a.1.text.cmp(&b.1.text))
                .then_with(|| a.1.nodes.cmp(&b.1.nodes))
        })
        .map(|(_, p)| p)
}

pub fn compress_utterance(
    turn: &Turn,
    method: CompressionMethod,
    constraints: &Constraints,
    res: &Resources,
) -> Result<CompressionResult> {
    UtteranceCluster::new(turn.index, &turn.content, *constraints, res).compress(method)
}

pub fn longest_sentence(turn: &Turn, res: &Resources) -> CompressionResult {
    UtteranceCluster::new(turn.index, &turn.content, Constraints::default(), res)
        .compress(CompressionMethod::Longest)
        .expect("the longest-sentence method builds no graph")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptTurn {
    pub origin: Option<usize>,
    pub speaker: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortScript {
    pub instance_id: String,
    pub methods: Vec<CompressionMethod>,
    pub turns: Vec<ScriptTurn>,
    /// Per-method results behind each kept turn, aligned with `turns`.
    pub provenance: Vec<Vec<CompressionResult>>,
}

/// Runs every method on every selected turn and joins each turn's distinct
/// outputs with single spaces in method order. Turns whose outputs are all
/// empty are dropped.
pub fn build_short_script(
    selection: &SpanSelection,
    methods: &[CompressionMethod],
    constraints: &Constraints,
    res: &Resources,
) -> Result<ShortScript> {
    if methods.is_empty() {
        return Err(Error::Usage(
            "a short script needs at least one compression method".into(),
        ));
    }
    let per_turn: Vec<Vec<CompressionResult>> = selection
        .turns
        .par_iter()
        .enumerate()
        .map(|(position, turn)| {
            let cluster = UtteranceCluster::new(position, &turn.content, *constraints, res);
            methods
                .iter()
                .map(|&m| cluster.compress(m))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut turns = Vec::new();
    let mut provenance = Vec::new();
    for (turn, results) in selection.turns.iter().zip(per_turn) {
        let mut texts: Vec<&str> = Vec::new();
        for r in &results {
            if !r.text.is_empty() && !texts.contains(&r.text.as_str()) {
                texts.push(&r.text);
            }
        }
        if texts.is_empty() {
            continue;
        }
        turns.push(ScriptTurn {
            origin: turn.origin,
            speaker: turn.speaker.clone(),
            text: texts.join(" "),
        });
        provenance.push(results);
    }
    Ok(ShortScript {
        instance_id: selection.instance_id.clone(),
        methods: methods.to_vec(),
        turns,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locator::SelectedTurn;

    fn res() -> &'static Resources {
        Resources::bundled()
    }

    fn turn(text: &str) -> Turn {
        Turn {
            index: 0,
            speaker: "A".into(),
            content: text.into(),
        }
    }

    #[test]
    fn filler_falls_back() {
        for method in CompressionMethod::COMBINED {
            let r =
                compress_utterance(&turn("Hmm."), method, &Constraints::default(), res()).unwrap();
            assert_eq!(r.status, CompressionStatus::FallbackLongest);
            assert_eq!(r.text, "Hmm.");
        }
    }

    #[test]
    fn single_valid_sentence_is_its_own_compression() {
        let text = "The industrial designer wants a rubber case because users dropped the old remote controls often.";
        for method in CompressionMethod::COMBINED {
            let r =
                compress_utterance(&turn(text), method, &Constraints::default(), res()).unwrap();
            assert_eq!(r.status, CompressionStatus::Compressed, "{method}");
            assert_eq!(r.text, text);
        }
    }

    #[test]
    fn empty_utterance() {
        for method in CompressionMethod::ALL {
            let r =
                compress_utterance(&turn("   "), method, &Constraints::default(), res()).unwrap();
            assert_eq!(r.status, CompressionStatus::Empty);
            assert!(r.text.is_empty());
        }
    }

    #[test]
    fn longest_sentence_rules() {
        let r = longest_sentence(
            &turn("Hmm. We should use rubber because it is durable."),
            res(),
        );
        assert_eq!(r.text, "We should use rubber because it is durable.");
        assert_eq!(r.status, CompressionStatus::Compressed);
        assert_eq!(r.method, CompressionMethod::Longest);
        assert_eq!(longest_sentence(&turn("Yes. No."), res()).text, "Yes.");
        assert_eq!(
            longest_sentence(&turn(""), res()).status,
            CompressionStatus::Empty
        );
    }

    #[test]
    fn method_parsing() {
        assert_eq!(
            parse_methods("combined").unwrap(),
            CompressionMethod::COMBINED
        );
        assert!(parse_methods("").unwrap().is_empty());
        assert!(parse_methods("none").unwrap().is_empty());
        assert_eq!(
            parse_methods("longest, filippova,longest").unwrap(),
            [CompressionMethod::Longest, CompressionMethod::Filippova]
        );
        assert!(matches!(parse_methods("entailment"), Err(Error::Usage(_))));
        assert_eq!(
            methods_label(&CompressionMethod::COMBINED),
            "filippova,keyphrase,degeneracy"
        );
    }

    fn selection(texts: &[&str]) -> SpanSelection {
        SpanSelection {
            instance_id: "i".into(),
            turns: texts
                .iter()
                .enumerate()
                .map(|(i, t)| SelectedTurn {
                    origin: Some(i),
                    speaker: format!("S{i}"),
                    content: t.to_string(),
                })
                .collect(),
            query_prepended: false,
        }
    }

    #[test]
    fn short_script_combination() {
        let sel = selection(&[
            "Hmm. Right.",
            "",
            "I think we should go with the rubber case.",
        ]);
        let one = build_short_script(
            &sel,
            &[CompressionMethod::Longest],
            &Constraints::default(),
            res(),
        )
        .unwrap();
        assert_eq!(one.turns.len(), 2);
        assert_eq!(one.turns[0].text, "Hmm.");
        assert_eq!(one.turns[1].speaker, "S2");
        assert_eq!(one.turns[1].origin, Some(2));

        // filippova falls back to the longest sentence, so the two texts coincide
        let two = build_short_script(
            &sel,
            &[CompressionMethod::Filippova, CompressionMethod::Longest],
            &Constraints::default(),
            res(),
        )
        .unwrap();
        assert_eq!(two.turns[0].text, "Hmm.");
        assert_eq!(two.provenance[0].len(), 2);

        assert!(build_short_script(&sel, &[], &Constraints::default(), res()).is_err());
    }
}
