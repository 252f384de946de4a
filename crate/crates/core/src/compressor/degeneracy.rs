//! Graph degeneracy (k-core) reranking.

use crate::wordgraph::{PathCandidate, WordGraph};

/// Core number of every vertex of an undirected simple graph given as
/// adjacency lists, by bucket-ordered peeling (O(V + E)).
pub fn core_numbers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);

    // vertices sorted by degree; bin[d] is where degree d starts in `order`
    let mut bin = vec![0usize; max_degree + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut position = vec![0usize; n];
    let mut order = vec![0usize; n];
    for v in 0..n {
        position[v] = bin[degree[v]];
        order[position[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..=max_degree).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = order[i];
        for &u in &adj[v] {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = position[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    position[u] = pw;
                    position[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    degree
}

/// Sum of the neighbours' core numbers for every node of a word graph,
/// computed on its undirected, unweighted view without START/END.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreRank {
    pub core: Vec<usize>,
    pub rank: Vec<f64>,
}

impl CoreRank {
    pub fn new(graph: &WordGraph) -> CoreRank {
        let adj = graph.undirected_adjacency();
        let core = core_numbers(&adj);
        let rank = adj
            .iter()
            .map(|ns| ns.iter().map(|&u| core[u] as f64).sum())
            .collect();
        CoreRank { core, rank }
    }

    /// `edge_weight_sum / (len × (1 + Σ CoreRank(interior) / len))`; lower is
    /// better.
    pub fn score(&self, path: &PathCandidate) -> f64 {
        let len = path.interior_len() as f64;
        let interior = &path.nodes[1..path.nodes.len() - 1];
        let centrality: f64 = interior.iter().map(|&n| self.rank[n]).sum();
        path.edge_weight_sum / (len * (1.0 + centrality / len))
    }
}

pub fn score_degeneracy(path: &PathCandidate, graph: &WordGraph) -> f64 {
    CoreRank::new(graph).score(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// For each k, repeatedly delete vertices of degree < k; survivors of the
    /// k-core have core number ≥ k.
    fn peeling_oracle(adj: &[Vec<usize>]) -> Vec<usize> {
        let n = adj.len();
        let mut core = vec![0; n];
        for k in 1..=n {
            let mut alive = vec![true; n];
            loop {
                let doomed: Vec<usize> = (0..n)
                    .filter(|&v| alive[v] && adj[v].iter().filter(|&&u| alive[u]).count() < k)
                    .collect();
                if doomed.is_empty() {
                    break;
                }
                for v in doomed {
                    alive[v] = false;
                }
            }
            for v in (0..n).filter(|&v| alive[v]) {
                core[v] = k;
            }
        }
        core
    }

    #[test]
    fn triangle_is_a_two_core() {
        let adj = adjacency(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        assert_eq!(core_numbers(&adj), [2, 2, 2, 1]);
    }

    #[test]
    fn eight_node_graph_matches_peeling() {
        // K4 on 0..4, a triangle 4-5-6 hanging off 3, and isolated 7
        let edges = [
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 2),
            (1, 3),
            (2, 3),
            (3, 4),
            (4, 5),
            (5, 6),
            (4, 6),
        ];
        let adj = adjacency(8, &edges);
        let expected = peeling_oracle(&adj);
        assert_eq!(expected, [3, 3, 3, 3, 2, 2, 2, 0]);
        assert_eq!(core_numbers(&adj), expected);
    }

    #[test]
    fn empty_graph() {
        assert!(core_numbers(&[]).is_empty());
        assert_eq!(core_numbers(&[vec![]]), [0]);
    }

    proptest! {
        #[test]
        fn bucket_peeling_matches_oracle(n in 1usize..14, raw in prop::collection::vec((0usize..14, 0usize..14), 0..40)) {
            let edges: Vec<(usize, usize)> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
            let adj = adjacency(n, &edges);
            prop_assert_eq!(core_numbers(&adj), peeling_oracle(&adj));
        }
    }
}
