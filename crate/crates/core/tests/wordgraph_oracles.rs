use meetsum_core::wordgraph::paths::DEFAULT_K;
use meetsum_core::wordgraph::{
    detokenize, k_lightest_paths, lightest_paths_where, tag_sentence, text::tag_token,
    PathCandidate, PathSearch, Pos, Resources, TaggedSentence, WordGraph, END, START,
};
use proptest::prelude::*;

fn res() -> &'static Resources {
    Resources::bundled()
}

fn tagged(texts: &[String]) -> Vec<TaggedSentence> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| tag_sentence(t, (0, i), res()).unwrap())
        .collect()
}

/// Every simple START→END path by depth-first search.
fn all_simple_paths(g: &WordGraph) -> Vec<Vec<usize>> {
    fn dfs(g: &WordGraph, path: &mut Vec<usize>, seen: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if last == END {
            out.push(path.clone());
            return;
        }
        for e in g.out_edges(last) {
            if !seen[e.to] {
                seen[e.to] = true;
                path.push(e.to);
                dfs(g, path, seen, out);
                path.pop();
                seen[e.to] = false;
            }
        }
    }
    let mut seen = vec![false; g.node_count()];
    seen[START] = true;
    let mut out = Vec::new();
    dfs(g, &mut vec![START], &mut seen, &mut out);
    out
}

struct Scored {
    nodes: Vec<usize>,
    weight: f64,
    text: String,
}

/// Weighs each path from the edge list directly, summing left to right.
fn exhaustive(g: &WordGraph) -> Vec<Scored> {
    let mut scored: Vec<Scored> = all_simple_paths(g)
        .into_iter()
        .filter(|p| p.len() > 2)
        .map(|nodes| {
            let mut sum = 0.0;
            for w in nodes.windows(2) {
                sum += g
                    .edges()
                    .iter()
                    .find(|e| e.from == w[0] && e.to == w[1])
                    .unwrap()
                    .weight;
            }
            let words: Vec<&str> = nodes[1..nodes.len() - 1]
                .iter()
                .map(|&n| g.node(n).surface())
                .collect();
            Scored {
                weight: sum / (nodes.len() - 2) as f64,
                text: detokenize(&words),
                nodes,
            }
        })
        .collect();
    scored.sort_by(|a, b| {
        a.weight
            .total_cmp(&b.weight)
            .then_with(|| a.text.cmp(&b.text))
            .then_with(|| a.nodes.cmp(&b.nodes))
    });
    scored
}

fn unlimited() -> PathSearch {
    PathSearch {
        k: usize::MAX,
        budget: usize::MAX,
    }
}

#[test]
fn cat_dog_graph_by_hand() {
    let g = WordGraph::build(&tagged(&["the cat sat".into(), "the dog sat".into()])).unwrap();
    let mut words: Vec<(String, usize)> = g
        .nodes()
        .iter()
        .skip(2)
        .map(|n| (n.lower().to_string(), n.freq))
        .collect();
    words.sort();
    assert_eq!(
        words,
        [
            ("cat".into(), 1),
            ("dog".into(), 1),
            ("sat".into(), 2),
            ("the".into(), 2)
        ]
    );
    assert_eq!(g.node_count(), 6);

    let id = |w: &str| g.nodes().iter().position(|n| n.lower() == w).unwrap();
    let mut edges: Vec<(usize, usize, usize)> =
        g.edges().iter().map(|e| (e.from, e.to, e.count)).collect();
    edges.sort();
    let mut expected = vec![
        (START, id("the"), 2),
        (id("the"), id("cat"), 1),
        (id("the"), id("dog"), 1),
        (id("cat"), id("sat"), 1),
        (id("dog"), id("sat"), 1),
        (id("sat"), END, 2),
    ];
    expected.sort();
    assert_eq!(edges, expected);

    // (f_i + f_j) / Σ 1/diff / (f_i f_j): START, the, sat, END all have
    // freq 2 and are adjacent in both sentences; cat and dog once.
    let outer = (2.0 + 2.0) / 2.0 / 4.0;
    let inner = (2.0 + 1.0) / 1.0 / 2.0;
    let per_path = (outer + inner + inner + outer) / 3.0;

    let paths = k_lightest_paths(&g, 5).unwrap();
    assert_eq!(paths.len(), 2);
    assert_eq!(all_simple_paths(&g).len(), 2);
    assert_eq!(paths[0].text, "the cat sat");
    assert_eq!(paths[1].text, "the dog sat");
    for p in &paths {
        assert!((p.weight - per_path).abs() < 1e-12);
    }
}

#[test]
fn single_sentence_has_one_path() {
    let g = WordGraph::build(&tagged(&["The designer likes the new case.".into()])).unwrap();
    let paths = k_lightest_paths(&g, 5).unwrap();
    assert_eq!(paths.len(), 1);
    assert_eq!(paths[0].text, "The designer likes the new case.");
}

#[test]
fn duplicate_words_split_nodes() {
    let g = WordGraph::build(&tagged(&["a a".into()])).unwrap();
    assert_eq!(g.nodes().iter().filter(|n| n.lower() == "a").count(), 2);
}

const VOCAB: [&str; 11] = [
    "the", "cat", "sat", "a", "dog", "ran", "on", "mat", "quickly", "red", ".",
];

fn sentences() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::collection::vec(0..VOCAB.len(), 1..6), 1..5).prop_map(|ss| {
        ss.into_iter()
            .map(|s| {
                s.into_iter()
                    .map(|i| VOCAB[i])
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            // a sentence of only "." would tokenize but carries no words
            .map(|s| {
                if s.chars().all(|c| c == '.' || c == ' ') {
                    "cat".to_string()
                } else {
                    s
                }
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn unlimited_search_equals_exhaustive_enumeration(texts in sentences()) {
        let g = WordGraph::build(&tagged(&texts)).unwrap();
        prop_assume!(g.node_count() <= 12);
        let oracle = exhaustive(&g);
        let found = lightest_paths_where(&g, &unlimited(), |_| true).unwrap();
        prop_assert_eq!(found.len(), oracle.len());
        for (f, o) in found.iter().zip(&oracle) {
            prop_assert_eq!(&f.nodes, &o.nodes);
            prop_assert_eq!(f.weight, o.weight);
            prop_assert_eq!(&f.text, &o.text);
        }
        let best = k_lightest_paths(&g, 1).unwrap();
        prop_assert_eq!(&best[0].nodes, &oracle[0].nodes);
        let top = k_lightest_paths(&g, DEFAULT_K).unwrap();
        prop_assert_eq!(top.len(), oracle.len().min(DEFAULT_K));
    }

    #[test]
    fn walks_reproduce_sentences(texts in sentences()) {
        let input = tagged(&texts);
        let g = WordGraph::build(&input).unwrap();
        prop_assert_eq!(g.walks().len(), input.len());
        for (walk, sentence) in g.walks().iter().zip(&input) {
            prop_assert_eq!(walk[0], START);
            prop_assert_eq!(*walk.last().unwrap(), END);
            for pair in walk.windows(2) {
                prop_assert!(g.edge(pair[0], pair[1]).is_some());
            }
            let lowers: Vec<&str> = walk[1..walk.len() - 1].iter().map(|&n| g.node(n).lower()).collect();
            let expected: Vec<&str> = sentence.tokens.iter().map(|t| t.lower.as_str()).collect();
            prop_assert_eq!(lowers, expected);
        }
        // freq and edge counts agree with the walks
        let mut freq = vec![0usize; g.node_count()];
        for walk in g.walks() {
            for &n in walk {
                freq[n] += 1;
            }
        }
        for (n, node) in g.nodes().iter().enumerate() {
            prop_assert_eq!(node.freq, freq[n]);
        }
        for e in g.edges() {
            let count = g.walks().iter().flat_map(|w| w.windows(2)).filter(|p| p[0] == e.from && p[1] == e.to).count();
            prop_assert_eq!(e.count, count);
            prop_assert!(e.weight >= 0.0);
        }
    }

    #[test]
    fn construction_is_deterministic(texts in sentences()) {
        let a = serde_json::to_string(&WordGraph::build(&tagged(&texts)).unwrap()).unwrap();
        let b = serde_json::to_string(&WordGraph::build(&tagged(&texts)).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn candidate_fields_match_realization(texts in sentences()) {
        let g = WordGraph::build(&tagged(&texts)).unwrap();
        for p in k_lightest_paths(&g, 20).unwrap() {
            check_candidate(&p)?;
        }
    }
}

fn check_candidate(p: &PathCandidate) -> Result<(), TestCaseError> {
    prop_assert_eq!(p.realization.len(), p.nodes.len() - 2);
    let tokens: Vec<_> = p.realization.iter().map(|s| tag_token(s, res())).collect();
    prop_assert_eq!(p.has_verb, tokens.iter().any(|t| t.pos == Pos::Verb));
    prop_assert_eq!(
        p.content_length,
        tokens
            .iter()
            .filter(|t| !t.is_stopword && !t.is_punct())
            .count()
    );
    Ok(())
}
