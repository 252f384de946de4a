//! Keyphrases from a word co-occurrence network ranked by power-iteration
//! centrality, used to rerank compression candidates.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::wordgraph::{PathCandidate, Pos, TaggedSentence, TaggedToken};

pub const DAMPING: f64 = 0.85;
pub const TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 100;
/// Tokens co-occur when they fall in the same window of this many tokens.
pub const WINDOW: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Keyphrase {
    pub words: Vec<String>,
    pub score: f64,
}

impl Keyphrase {
    pub fn text(&self) -> String {
        self.words.join(" ")
    }
}

fn is_candidate(token: &TaggedToken) -> bool {
    !token.is_stopword && matches!(token.pos, Pos::Noun | Pos::Adj)
}

/// Centrality of each candidate word (non-stopword noun or adjective).
pub fn word_scores(sentences: &[TaggedSentence]) -> BTreeMap<String, f64> {
    let mut vocab: BTreeMap<String, usize> = BTreeMap::new();
    for token in sentences
        .iter()
        .flat_map(|s| &s.tokens)
        .filter(|t| is_candidate(t))
    {
        let next = vocab.len();
        vocab.entry(token.lower.clone()).or_insert(next);
    }
    // ids in lexical order keep the iteration order independent of input order
    for (i, id) in vocab.values_mut().enumerate() {
        *id = i;
    }
    let n = vocab.len();
    let mut neighbours: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for sentence in sentences {
        let tokens = &sentence.tokens;
        for i in 0..tokens.len() {
            for j in i + 1..(i + WINDOW).min(tokens.len()) {
                let (a, b) = (&tokens[i], &tokens[j]);
                if is_candidate(a) && is_candidate(b) && a.lower != b.lower {
                    let (x, y) = (vocab[&a.lower], vocab[&b.lower]);
                    neighbours[x].insert(y);
                    neighbours[y].insert(x);
                }
            }
        }
    }

    let mut scores = vec![1.0; n];
    for _ in 0..MAX_ITERATIONS {
        let next: Vec<f64> = (0..n)
            .map(|v| {
                let inflow: f64 = neighbours[v]
                    .iter()
                    .map(|&u| scores[u] / neighbours[u].len() as f64)
                    .sum();
                (1.0 - DAMPING) + DAMPING * inflow
            })
            .collect();
        let delta = next
            .iter()
            .zip(&scores)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        scores = next;
        if delta < TOLERANCE {
            break;
        }
    }
    vocab.into_iter().map(|(w, id)| (w, scores[id])).collect()
}

/// Ranks keyphrases of a sentence cluster: the top third of candidate words
/// by centrality, merged into phrases where they appear adjacently. A
/// phrase scores the sum of its words' scores.
pub fn rank_keyphrases(sentences: &[TaggedSentence]) -> Vec<Keyphrase> {
    let scores = word_scores(sentences);
    if scores.is_empty() {
        return Vec::new();
    }
    let mut ordered: Vec<(&String, f64)> = scores.iter().map(|(w, &s)| (w, s)).collect();
    ordered.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let top: BTreeSet<&str> = ordered
        .iter()
        .take(scores.len().div_ceil(3))
        .map(|(w, _)| w.as_str())
        .collect();

    let mut phrases: BTreeSet<Vec<String>> = BTreeSet::new();
    for sentence in sentences {
        let mut run: Vec<String> = Vec::new();
        for token in &sentence.tokens {
            if is_candidate(token) && top.contains(token.lower.as_str()) {
                run.push(token.lower.clone());
            } else if !run.is_empty() {
                phrases.insert(std::mem::take(&mut run));
            }
        }
        if !run.is_empty() {
            phrases.insert(run);
        }
    }

    let mut ranked: Vec<Keyphrase> = phrases
        .into_iter()
        .map(|words| {
            let score = words.iter().map(|w| scores[w]).sum();
            Keyphrase { words, score }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.words.cmp(&b.words))
    });
    ranked
}

/// `edge_weight_sum / (len × (1 + Σ covered keyphrase scores))`, where a
/// keyphrase is covered when every one of its words is on the path. Lower is
/// better.
pub fn score_keyphrase(path: &PathCandidate, keyphrases: &[Keyphrase]) -> f64 {
    let on_path: BTreeSet<&str> = path.lowers.iter().map(String::as_str).collect();
    let covered: f64 = keyphrases
        .iter()
        .filter(|k| k.words.iter().all(|w| on_path.contains(w.as_str())))
        .map(|k| k.score)
        .sum();
    path.edge_weight_sum / (path.interior_len() as f64 * (1.0 + covered))
}
