//! Multi-sentence compression word graph.
//!
//! Sentences are added one at a time. Each token maps onto a node keyed by
//! `(lower, pos)`; a node never holds two tokens of the same sentence, so
//! every sentence stays a simple START→END walk. Content words are mapped
//! first, then stopwords, then punctuation; stopwords and punctuation only
//! merge with a node that shares a neighbouring word.
//!
//! Edge weights follow the classic multi-sentence compression formulation:
//!
//! ```text
//! w'(i,j) = (freq(i) + freq(j)) / Σ_s 1 / diff(s, i, j)
//! w(i,j)  = w'(i,j) / (freq(i) · freq(j))
//! ```
//!
//! where `diff(s, i, j)` is the offset of `j` after `i` in sentence `s`,
//! summed over every sentence in which `j` follows `i`.

pub mod lexicon;
pub mod paths;
pub mod text;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

pub use lexicon::{Pos, Resources};
pub use paths::{k_lightest_paths, lightest_paths_where, PathCandidate, PathSearch};
pub use text::{
    detokenize, split_sentences, tag_sentence, tag_utterance, tokenize, word_count, TaggedSentence,
    TaggedToken,
};

pub const START: usize = 0;
pub const END: usize = 1;

const START_CONTEXT: &str = "<s>";
const END_CONTEXT: &str = "</s>";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NodeKey {
    Start,
    End,
    Word { lower: String, pos: Pos, sense: u32 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Node {
    pub key: NodeKey,
    pub freq: usize,
    pub is_stopword: bool,
    /// Surface forms with counts, in first-seen order.
    surfaces: Vec<(String, usize)>,
    /// `(sentence, offset)` pairs; START is offset 0, END is `len + 1`.
    positions: Vec<(usize, usize)>,
    prev_context: BTreeSet<String>,
    next_context: BTreeSet<String>,
}

impl Node {
    fn terminal(key: NodeKey) -> Self {
        Node {
            key,
            freq: 0,
            is_stopword: false,
            surfaces: Vec::new(),
            positions: Vec::new(),
            prev_context: BTreeSet::new(),
            next_context: BTreeSet::new(),
        }
    }

    pub fn pos(&self) -> Option<Pos> {
        match &self.key {
            NodeKey::Word { pos, .. } => Some(*pos),
            _ => None,
        }
    }

    pub fn lower(&self) -> &str {
        match &self.key {
            NodeKey::Start => "<START>",
            NodeKey::End => "<END>",
            NodeKey::Word { lower, .. } => lower,
        }
    }

    pub fn is_punct(&self) -> bool {
        self.pos() == Some(Pos::Punct)
    }

    pub fn is_content(&self) -> bool {
        matches!(self.key, NodeKey::Word { .. }) && !self.is_stopword && !self.is_punct()
    }

    /// Most frequent surface; the earliest seen wins ties.
    pub fn surface(&self) -> &str {
        let mut best: Option<&(String, usize)> = None;
        for entry in &self.surfaces {
            if best.is_none_or(|b| entry.1 > b.1) {
                best = Some(entry);
            }
        }
        best.map_or_else(|| self.lower(), |(s, _)| s.as_str())
    }

    fn contains_sentence(&self, sentence: usize) -> bool {
        self.positions.iter().any(|&(s, _)| s == sentence)
    }

    fn offset_in(&self, sentence: usize) -> Option<usize> {
        self.positions
            .iter()
            .find(|&&(s, _)| s == sentence)
            .map(|&(_, o)| o)
    }

    fn context_overlap(&self, prev: &str, next: &str) -> usize {
        usize::from(self.prev_context.contains(prev))
            + usize::from(self.next_context.contains(next))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub count: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WordGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    /// Outgoing edge indices per node, ordered by target id.
    out: Vec<Vec<usize>>,
    walks: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pass {
    Content,
    Stopword,
    Punct,
}

fn pass_of(token: &TaggedToken) -> Pass {
    if token.is_punct() {
        Pass::Punct
    } else if token.is_stopword {
        Pass::Stopword
    } else {
        Pass::Content
    }
}

impl WordGraph {
    /// Builds the graph for a non-empty cluster of sentences.
    pub fn build(sentences: &[TaggedSentence]) -> crate::Result<WordGraph> {
        if sentences.is_empty() {
            return Err(crate::Error::Usage(
                "a word graph needs at least one sentence".into(),
            ));
        }
        let mut builder = Builder::default();
        for (s, sentence) in sentences.iter().enumerate() {
            builder.add_sentence(s, &sentence.tokens);
        }
        Ok(builder.finish())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn walks(&self) -> &[Vec<usize>] {
        &self.walks
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Outgoing edges of `node`, ordered by target id.
    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.out[node].iter().map(move |&e| &self.edges[e])
    }

    pub fn edge(&self, from: usize, to: usize) -> Option<&Edge> {
        self.out[from]
            .binary_search_by_key(&to, |&e| self.edges[e].to)
            .ok()
            .map(|i| &self.edges[self.out[from][i]])
    }

    /// Undirected, unweighted adjacency over word nodes (START/END dropped).
    /// Index `i` of the result is node `i`; terminals get empty lists.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.nodes.len()];
        for e in &self.edges {
            if e.from == e.to || [e.from, e.to].iter().any(|&n| n == START || n == END) {
                continue;
            }
            adj[e.from].insert(e.to);
            adj[e.to].insert(e.from);
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

#[derive(Default)]
struct Builder {
    nodes: Vec<Node>,
    by_key: HashMap<(String, Pos), Vec<usize>>,
    walks: Vec<Vec<usize>>,
}

impl Builder {
    fn add_sentence(&mut self, s: usize, tokens: &[TaggedToken]) {
        if self.nodes.is_empty() {
            self.nodes.push(Node::terminal(NodeKey::Start));
            self.nodes.push(Node::terminal(NodeKey::End));
        }
        let mut mapping: Vec<Option<usize>> = vec![None; tokens.len()];
        for pass in [Pass::Content, Pass::Stopword, Pass::Punct] {
            for (i, token) in tokens.iter().enumerate() {
                if pass_of(token) != pass {
                    continue;
                }
                let prev = if i == 0 {
                    START_CONTEXT
                } else {
                    &tokens[i - 1].lower
                };
                let next = tokens.get(i + 1).map_or(END_CONTEXT, |t| t.lower.as_str());
                let id = match self.choose_node(s, token, pass, prev, next) {
                    Some(id) => id,
                    None => self.new_node(token),
                };
                // claim the node now so a repeated word in this sentence cannot reuse it
                self.nodes[id].positions.push((s, i + 1));
                mapping[i] = Some(id);
            }
        }

        let len = tokens.len();
        self.nodes[START].positions.push((s, 0));
        self.nodes[START].freq += 1;
        self.nodes[END].positions.push((s, len + 1));
        self.nodes[END].freq += 1;

        let mut walk = Vec::with_capacity(len + 2);
        walk.push(START);
        for (i, (token, id)) in tokens.iter().zip(&mapping).enumerate() {
            let id = id.expect("every token is mapped");
            let node = &mut self.nodes[id];
            node.freq += 1;
            match node
                .surfaces
                .iter_mut()
                .find(|(sf, _)| *sf == token.surface)
            {
                Some(entry) => entry.1 += 1,
                None => node.surfaces.push((token.surface.clone(), 1)),
            }
            let prev = if i == 0 {
                START_CONTEXT.to_string()
            } else {
                tokens[i - 1].lower.clone()
            };
            let next = tokens
                .get(i + 1)
                .map_or_else(|| END_CONTEXT.to_string(), |t| t.lower.clone());
            node.prev_context.insert(prev);
            node.next_context.insert(next);
            walk.push(id);
        }
        walk.push(END);
        self.walks.push(walk);
    }

    fn choose_node(
        &self,
        s: usize,
        token: &TaggedToken,
        pass: Pass,
        prev: &str,
        next: &str,
    ) -> Option<usize> {
        let candidates: Vec<usize> = self
            .by_key
            .get(&(token.lower.clone(), token.pos))
            .into_iter()
            .flatten()
            .copied()
            .filter(|&id| !self.nodes[id].contains_sentence(s))
            .collect();
        if pass == Pass::Content && candidates.len() == 1 {
            return Some(candidates[0]);
        }
        candidates
            .into_iter()
            .map(|id| {
                (
                    id,
                    self.nodes[id].context_overlap(prev, next),
                    self.nodes[id].freq,
                )
            })
            .filter(|&(_, overlap, _)| pass == Pass::Content || overlap > 0)
            // highest overlap, then highest frequency, then oldest node
            .max_by(|a, b| a.1.cmp(&b.1).then(a.2.cmp(&b.2)).then(b.0.cmp(&a.0)))
            .map(|(id, _, _)| id)
    }

    fn new_node(&mut self, token: &TaggedToken) -> usize {
        let key = (token.lower.clone(), token.pos);
        let senses = self.by_key.entry(key).or_default();
        let id = self.nodes.len();
        self.nodes.push(Node {
            key: NodeKey::Word {
                lower: token.lower.clone(),
                pos: token.pos,
                sense: senses.len() as u32,
            },
            freq: 0,
            is_stopword: token.is_stopword,
            surfaces: Vec::new(),
            positions: Vec::new(),
            prev_context: BTreeSet::new(),
            next_context: BTreeSet::new(),
        });
        senses.push(id);
        id
    }

    fn finish(self) -> WordGraph {
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for walk in &self.walks {
            for pair in walk.windows(2) {
                *counts.entry((pair[0], pair[1])).or_default() += 1;
            }
        }
        let nodes = self.nodes;
        let sentence_count = self.walks.len();
        let mut out = vec![Vec::new(); nodes.len()];
        let edges: Vec<Edge> = counts
            .into_iter()
            .enumerate()
            .map(|(idx, ((from, to), count))| {
                out[from].push(idx);
                Edge {
                    from,
                    to,
                    count,
                    weight: edge_weight(&nodes[from], &nodes[to], sentence_count),
                }
            })
            .collect();
        WordGraph {
            nodes,
            edges,
            out,
            walks: self.walks,
        }
    }
}

fn edge_weight(from: &Node, to: &Node, sentence_count: usize) -> f64 {
    let mut inverse_offsets = 0.0;
    for s in 0..sentence_count {
        if let (Some(a), Some(b)) = (from.offset_in(s), to.offset_in(s)) {
            if b > a {
                inverse_offsets += 1.0 / (b - a) as f64;
            }
        }
    }
    let (fi, fj) = (from.freq as f64, to.freq as f64);
    (fi + fj) / inverse_offsets / (fi * fj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tagged(texts: &[&str]) -> Vec<TaggedSentence> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| tag_sentence(t, (0, i), Resources::bundled()).unwrap())
            .collect()
    }

    fn lowers(g: &WordGraph) -> Vec<String> {
        g.nodes().iter().map(|n| n.lower().to_string()).collect()
    }

    #[test]
    fn single_sentence_has_no_merges() {
        let g = WordGraph::build(&tagged(&["the cat sat"])).unwrap();
        assert_eq!(lowers(&g), ["<START>", "<END>", "cat", "sat", "the"]);
        assert!(g.nodes().iter().all(|n| n.freq == 1));
        assert_eq!(g.walks().len(), 1);
        assert_eq!(g.edges().len(), 4);
    }

    #[test]
    fn repeated_word_in_one_sentence_splits() {
        let g = WordGraph::build(&tagged(&["a a"])).unwrap();
        let a_nodes: Vec<&Node> = g.nodes().iter().filter(|n| n.lower() == "a").collect();
        assert_eq!(a_nodes.len(), 2);
        assert_ne!(a_nodes[0].key, a_nodes[1].key);
    }

    #[test]
    fn stopword_needs_shared_context() {
        // "the" precedes different words and follows START in both, so it merges
        let g = WordGraph::build(&tagged(&["the cat sat", "the dog sat"])).unwrap();
        assert_eq!(g.node_count(), 6);
        // "of" shares no neighbour, so it does not merge
        let g = WordGraph::build(&tagged(&["box of cats", "pile of dogs"])).unwrap();
        assert_eq!(g.nodes().iter().filter(|n| n.lower() == "of").count(), 2);
    }

    #[test]
    fn edge_weights_follow_offsets() {
        let g = WordGraph::build(&tagged(&["the cat sat", "the dog sat"])).unwrap();
        // START (freq 2) -> the (freq 2), adjacent in both sentences
        let the = g.nodes().iter().position(|n| n.lower() == "the").unwrap();
        let w = g.edge(START, the).unwrap().weight;
        assert!((w - (4.0 / 2.0) / 4.0).abs() < 1e-12, "{w}");
        // cat (freq 1) -> sat (freq 2): adjacent once
        let cat = g.nodes().iter().position(|n| n.lower() == "cat").unwrap();
        let sat = g.nodes().iter().position(|n| n.lower() == "sat").unwrap();
        assert!((g.edge(cat, sat).unwrap().weight - 1.5).abs() < 1e-12);
    }

    #[test]
    fn empty_cluster_is_rejected() {
        assert!(WordGraph::build(&[]).is_err());
    }

    #[test]
    fn surface_prefers_most_frequent() {
        let g = WordGraph::build(&tagged(&["Cat sat", "cat ran", "cat slept"])).unwrap();
        let cat = g.nodes().iter().find(|n| n.lower() == "cat").unwrap();
        assert_eq!(cat.freq, 3);
        assert_eq!(cat.surface(), "cat");
    }
}
