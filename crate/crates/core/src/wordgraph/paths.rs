//! Lightest START→END simple paths under length-normalized weight.
//!
//! A path's weight is its edge-weight sum divided by its interior node count.
//! That score is not additive, so paths are enumerated lazily in order of
//! raw sum (Yen's algorithm) and the enumeration stops once no unseen path
//! can beat the current k-th best. The bound for an unseen path with `L`
//! interior nodes is `max(S, lb(L)) / L`, where `S` is the sum of the last
//! enumerated path and `lb(L)` the lightest START→END walk with exactly `L`
//! interior nodes.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use super::{detokenize, Pos, WordGraph, END, START};
use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 100;
pub const DEFAULT_BUDGET: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSearch {
    /// Number of paths to return.
    pub k: usize,
    /// Upper bound on the number of paths enumerated. When it is reached the
    /// best paths seen so far are returned.
    pub budget: usize,
}

impl Default for PathSearch {
    fn default() -> Self {
        PathSearch {
            k: DEFAULT_K,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathCandidate {
    /// Node ids, START and END included.
    pub nodes: Vec<usize>,
    pub edge_weight_sum: f64,
    /// `edge_weight_sum / interior_len`.
    pub weight: f64,
    pub realization: Vec<String>,
    pub lowers: Vec<String>,
    pub content_length: usize,
    pub has_verb: bool,
    pub text: String,
}

impl PathCandidate {
    /// Evaluates a START→END node sequence. The sum runs left to right so
    /// the same path always gets bit-identical weights.
    pub fn from_nodes(graph: &WordGraph, nodes: Vec<usize>) -> Result<Self> {
        if nodes.len() < 3 || nodes[0] != START || nodes[nodes.len() - 1] != END {
            return Err(Error::Internal(format!("not a START→END path: {nodes:?}")));
        }
        let mut sum = 0.0;
        for pair in nodes.windows(2) {
            let edge = graph
                .edge(pair[0], pair[1])
                .ok_or_else(|| Error::Internal(format!("missing edge {pair:?}")))?;
            sum += edge.weight;
        }
        let interior = &nodes[1..nodes.len() - 1];
        let realization: Vec<String> = interior
            .iter()
            .map(|&n| graph.node(n).surface().to_string())
            .collect();
        let lowers = interior
            .iter()
            .map(|&n| graph.node(n).lower().to_string())
            .collect();
        let content_length = interior
            .iter()
            .filter(|&&n| graph.node(n).is_content())
            .count();
        let has_verb = interior
            .iter()
            .any(|&n| graph.node(n).pos() == Some(Pos::Verb));
        let text = detokenize(&realization);
        Ok(PathCandidate {
            weight: sum / interior.len() as f64,
            edge_weight_sum: sum,
            nodes,
            realization,
            lowers,
            content_length,
            has_verb,
            text,
        })
    }

    pub fn interior_len(&self) -> usize {
        self.nodes.len() - 2
    }

    /// Weight ascending, then realization text, then node ids.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then_with(|| self.text.cmp(&other.text))
            .then_with(|| self.nodes.cmp(&other.nodes))
    }
}

/// The `k` lightest simple paths (fewer when fewer exist).
pub fn k_lightest_paths(graph: &WordGraph, k: usize) -> Result<Vec<PathCandidate>> {
    lightest_paths_where(
        graph,
        &PathSearch {
            k,
            ..PathSearch::default()
        },
        |_| true,
    )
}

/// The `search.k` lightest simple paths that satisfy `accept`.
pub fn lightest_paths_where<F>(
    graph: &WordGraph,
    search: &PathSearch,
    accept: F,
) -> Result<Vec<PathCandidate>>
where
    F: Fn(&PathCandidate) -> bool,
{
    if search.k == 0 {
        return Ok(Vec::new());
    }
    let mut yen = Yen::new(graph)?;
    let mut kept: Vec<PathCandidate> = Vec::new();
    // the k smallest accepted weights, largest on top
    let mut best: BinaryHeap<TotalF64> = BinaryHeap::new();
    let mut bounds: Option<Vec<f64>> = None;
    let mut enumerated = 0usize;

    while let Some(nodes) = yen.next_path() {
        enumerated += 1;
        let candidate = PathCandidate::from_nodes(graph, nodes)?;
        let last_sum = candidate.edge_weight_sum;
        if accept(&candidate) {
            best.push(TotalF64(candidate.weight));
            if best.len() > search.k {
                best.pop();
            }
            kept.push(candidate);
        }
        if best.len() == search.k {
            let kth = best.peek().map(|w| w.0).unwrap_or(f64::INFINITY);
            let lb = bounds.get_or_insert_with(|| walk_lower_bounds(graph));
            if kth < unseen_bound(lb, last_sum) {
                break;
            }
        }
        if enumerated >= search.budget {
            log::debug!(
                "path search budget of {} exhausted on a {}-node graph",
                search.budget,
                graph.node_count()
            );
            break;
        }
    }
    if enumerated == 0 {
        return Err(Error::Internal("word graph has no START→END path".into()));
    }
    kept.sort_by(PathCandidate::rank_cmp);
    kept.truncate(search.k);
    Ok(kept)
}

/// `lb[L]`: lightest START→END walk with exactly `L` interior nodes
/// (infinite when none). Walks may repeat nodes, so this bounds simple paths
/// from below.
fn walk_lower_bounds(graph: &WordGraph) -> Vec<f64> {
    let n = graph.node_count();
    let max_len = n.saturating_sub(2);
    let mut lb = vec![f64::INFINITY; max_len + 1];
    // reach[v]: lightest walk START→v with `l` interior nodes (v included)
    let mut reach = vec![f64::INFINITY; n];
    for e in graph.out_edges(START) {
        if e.to != END {
            reach[e.to] = reach[e.to].min(e.weight);
        }
    }
    for slot in lb.iter_mut().skip(1) {
        let mut next = vec![f64::INFINITY; n];
        for (v, &d) in reach.iter().enumerate() {
            if !d.is_finite() {
                continue;
            }
            for e in graph.out_edges(v) {
                let total = d + e.weight;
                if e.to == END {
                    *slot = slot.min(total);
                } else {
                    next[e.to] = next[e.to].min(total);
                }
            }
        }
        reach = next;
    }
    lb
}

fn unseen_bound(lb: &[f64], last_sum: f64) -> f64 {
    let bound = lb
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, w)| w.is_finite())
        .map(|(len, &w)| w.max(last_sum) / len as f64)
        .fold(f64::INFINITY, f64::min);
    // shave a little so rounding differences never cut the search short
    bound - bound.abs() * 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TotalF64(f64);

impl Eq for TotalF64 {}

impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Lazy Yen enumeration of simple START→END paths by raw edge-weight sum.
/// Found paths live in a prefix trie, so the edges to block at a spur node
/// are the children of the trie node for its root prefix. Only nodes at or
/// after a path's deviation point are used as spurs (Lawler): earlier spurs
/// would repeat candidates already generated for its parent.
struct Yen<'g> {
    graph: &'g WordGraph,
    /// `trie[t]`: next node id → child trie index.
    trie: Vec<BTreeMap<usize, usize>>,
    candidates: BinaryHeap<Reverse<(TotalF64, Vec<usize>, usize)>>,
    seen: HashSet<Vec<usize>>,
    last: Option<(Vec<usize>, usize)>,
    started: bool,
}

impl<'g> Yen<'g> {
    fn new(graph: &'g WordGraph) -> Result<Self> {
        if graph.node_count() < 2 {
            return Err(Error::Internal("word graph without terminals".into()));
        }
        Ok(Yen {
            graph,
            trie: vec![BTreeMap::new()],
            candidates: BinaryHeap::new(),
            seen: HashSet::new(),
            last: None,
            started: false,
        })
    }

    fn path_sum(&self, path: &[usize]) -> f64 {
        path.windows(2)
            .map(|p| {
                self.graph
                    .edge(p[0], p[1])
                    .map_or(f64::INFINITY, |e| e.weight)
            })
            .sum()
    }

    fn push_candidate(&mut self, path: Vec<usize>, deviation: usize) {
        if self.seen.insert(path.clone()) {
            let sum = self.path_sum(&path);
            self.candidates
                .push(Reverse((TotalF64(sum), path, deviation)));
        }
    }

    /// Trie root is the empty prefix; `path[0]` is always START.
    fn remember(&mut self, path: &[usize]) {
        let mut t = 0;
        for &v in path {
            let next = self.trie.len();
            t = *self.trie[t].entry(v).or_insert(next);
            if t == next {
                self.trie.push(BTreeMap::new());
            }
        }
    }

    fn next_path(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
            let first = self.dijkstra(START, &[], &BTreeSet::new())?;
            self.push_candidate(first, 0);
        } else if let Some((last, deviation)) = self.last.take() {
            self.spur_from(&last, deviation);
        }
        let Reverse((_, path, deviation)) = self.candidates.pop()?;
        self.remember(&path);
        self.last = Some((path.clone(), deviation));
        Some(path)
    }

    fn spur_from(&mut self, last: &[usize], deviation: usize) {
        // walk the trie down to the root prefix of the first spur
        let mut t = 0;
        for &v in &last[..deviation] {
            t = self.trie[t][&v];
        }
        for i in deviation..last.len() - 1 {
            t = self.trie[t][&last[i]];
            let spur = last[i];
            let blocked_edges: BTreeSet<usize> = self.trie[t].keys().copied().collect();
            if let Some(tail) = self.dijkstra(spur, &last[..i], &blocked_edges) {
                let mut path = last[..i].to_vec();
                path.extend(tail);
                self.push_candidate(path, i);
            }
        }
    }

    /// Lightest path `from`→END avoiding `blocked_nodes` and the first hops
    /// `from`→`blocked_next`; ties resolve towards lower node ids.
    fn dijkstra(
        &self,
        from: usize,
        blocked_nodes: &[usize],
        blocked_next: &BTreeSet<usize>,
    ) -> Option<Vec<usize>> {
        let n = self.graph.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut done = vec![false; n];
        for &b in blocked_nodes {
            done[b] = true;
        }
        let mut heap = BinaryHeap::new();
        dist[from] = 0.0;
        heap.push(Reverse((TotalF64(0.0), from)));
        while let Some(Reverse((TotalF64(d), v))) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            if v == END {
                break;
            }
            for e in self.graph.out_edges(v) {
                if done[e.to] || (v == from && blocked_next.contains(&e.to)) {
                    continue;
                }
                let nd = d + e.weight;
                if nd < dist[e.to] {
                    dist[e.to] = nd;
                    prev[e.to] = v;
                    heap.push(Reverse((TotalF64(nd), e.to)));
                }
            }
        }
        if !dist[END].is_finite() {
            return None;
        }
        let mut path = vec![END];
        let mut v = END;
        while v != from {
            v = prev[v];
            path.push(v);
        }
        path.reverse();
        Some(path)
    }
}
