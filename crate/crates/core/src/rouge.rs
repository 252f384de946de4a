//! ROUGE-1, ROUGE-2 and summary-level ROUGE-L.
//!
//! N-gram matches are clipped: each distinct n-gram contributes
//! `min(count in candidate, count in reference)`. A zero denominator makes
//! the affected component 0 instead of undefined, so empty summaries score
//! rather than fail.

use std::collections::HashMap;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wordgraph::Resources;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Prf {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }

    fn from_counts(matched: usize, candidate_total: usize, reference_total: usize) -> Prf {
        let ratio = |den: usize| {
            if den == 0 {
                0.0
            } else {
                matched as f64 / den as f64
            }
        };
        Prf::new(ratio(candidate_total), ratio(reference_total))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RougeReport {
    pub rouge1: Prf,
    pub rouge2: Prf,
    pub rouge_l: Prf,
}

impl RougeReport {
    pub fn components(&self) -> [f64; 9] {
        let [a, b, c] = [self.rouge1, self.rouge2, self.rouge_l];
        [
            a.precision,
            a.recall,
            a.f1,
            b.precision,
            b.recall,
            b.f1,
            c.precision,
            c.recall,
            c.f1,
        ]
    }

    fn from_components(c: [f64; 9]) -> RougeReport {
        let prf = |i: usize| Prf {
            precision: c[i],
            recall: c[i + 1],
            f1: c[i + 2],
        };
        RougeReport {
            rouge1: prf(0),
            rouge2: prf(3),
            rouge_l: prf(6),
        }
    }
}

/// Preprocessing switches; both off by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RougeOptions {
    pub stem: bool,
    pub remove_stopwords: bool,
}

/// Case-folds and splits on every non-alphanumeric run.
pub fn tokenize_for_rouge(text: &str, options: RougeOptions, res: &Resources) -> Vec<String> {
    let stemmer = options.stem.then(|| Stemmer::create(Algorithm::English));
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| !options.remove_stopwords || !res.is_stopword(t))
        .map(|t| match &stemmer {
            Some(s) => s.stem(&t).into_owned(),
            None => t,
        })
        .collect()
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    for window in tokens.windows(n) {
        let gram: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

pub fn rouge_n<S: AsRef<str>>(candidate: &[S], reference: &[S], n: usize) -> Result<Prf> {
    if !(1..=2).contains(&n) {
        return Err(Error::Usage(format!(
            "ROUGE-N is defined here for n = 1 or 2, got {n}"
        )));
    }
    let cand = ngram_counts(candidate, n);
    let refs = ngram_counts(reference, n);
    let matched: usize = cand
        .iter()
        .map(|(gram, &c)| refs.get(gram).map_or(0, |&r| c.min(r)))
        .sum();
    let total = |len: usize| (len + 1).saturating_sub(n);
    Ok(Prf::from_counts(
        matched,
        total(candidate.len()),
        total(reference.len()),
    ))
}

/// Length of the longest common subsequence, in O(|a|·|b|) time and
/// O(|b|) space.
pub fn lcs_len<S: AsRef<str>>(a: &[S], b: &[S]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diagonal = 0;
        for (j, y) in b.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = if x.as_ref() == y.as_ref() {
                diagonal + 1
            } else {
                above.max(row[j])
            };
            diagonal = above;
        }
    }
    row[b.len()]
}

pub fn rouge_l<S: AsRef<str>>(candidate: &[S], reference: &[S]) -> Prf {
    Prf::from_counts(
        lcs_len(candidate, reference),
        candidate.len(),
        reference.len(),
    )
}

pub fn score_tokens<S: AsRef<str>>(candidate: &[S], reference: &[S]) -> RougeReport {
    RougeReport {
        rouge1: rouge_n(candidate, reference, 1).expect("n = 1 is valid"),
        rouge2: rouge_n(candidate, reference, 2).expect("n = 2 is valid"),
        rouge_l: rouge_l(candidate, reference),
    }
}

pub fn score(
    candidate: &str,
    reference: &str,
    options: RougeOptions,
    res: &Resources,
) -> RougeReport {
    score_tokens(
        &tokenize_for_rouge(candidate, options, res),
        &tokenize_for_rouge(reference, options, res),
    )
}

/// Component-wise arithmetic mean. Values are summed in sorted order, so the
/// result does not depend on input order.
pub fn aggregate(reports: &[RougeReport]) -> Result<RougeReport> {
    if reports.is_empty() {
        return Err(Error::Usage("cannot aggregate an empty report set".into()));
    }
    let mut means = [0.0; 9];
    for (i, mean) in means.iter_mut().enumerate() {
        let mut values: Vec<f64> = reports.iter().map(|r| r.components()[i]).collect();
        values.sort_by(f64::total_cmp);
        *mean = values.iter().sum::<f64>() / reports.len() as f64;
    }
    Ok(RougeReport::from_components(means))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(text: &str) -> Vec<String> {
        tokenize_for_rouge(text, RougeOptions::default(), Resources::bundled())
    }

    #[test]
    fn tokenizer_examples() {
        assert_eq!(toks("The cat's mat."), ["the", "cat", "s", "mat"]);
        assert!(toks("").is_empty());
        assert_eq!(toks("A1-B2"), ["a1", "b2"]);
    }

    #[test]
    fn tokenizer_options() {
        let res = Resources::bundled();
        let opts = RougeOptions {
            stem: true,
            remove_stopwords: true,
        };
        assert_eq!(
            tokenize_for_rouge("The cats were running", opts, res),
            ["cat", "run"]
        );
    }

    #[test]
    fn cat_sat_triple() {
        let c = toks("the cat sat");
        let r = toks("the cat sat on the mat");
        let r1 = rouge_n(&c, &r, 1).unwrap();
        assert!((r1.recall - 0.5).abs() < 1e-12 && (r1.precision - 1.0).abs() < 1e-12);
        assert!((r1.f1 - 2.0 / 3.0).abs() < 1e-9);
        let r2 = rouge_n(&c, &r, 2).unwrap();
        assert!((r2.recall - 0.4).abs() < 1e-12 && (r2.precision - 1.0).abs() < 1e-12);
        assert!((r2.f1 - 4.0 / 7.0).abs() < 1e-9);
        assert_eq!(lcs_len(&c, &r), 3);
        assert!((rouge_l(&c, &r).f1 - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let empty: Vec<String> = vec![];
        let x = toks("a b");
        assert_eq!(rouge_n(&empty, &x, 1).unwrap(), Prf::default());
        assert_eq!(rouge_n(&x, &empty, 2).unwrap(), Prf::default());
        assert_eq!(rouge_l(&toks("a b"), &toks("c d")), Prf::default());
        // a single token has no bigrams
        assert_eq!(rouge_n(&toks("a"), &toks("a"), 2).unwrap(), Prf::default());
        assert!(rouge_n(&x, &x, 3).is_err());
    }

    #[test]
    fn aggregate_mean_and_errors() {
        let mk = |f: f64| RougeReport {
            rouge1: Prf {
                precision: f,
                recall: f,
                f1: f,
            },
            ..RougeReport::default()
        };
        assert_eq!(aggregate(&[mk(0.3)]).unwrap(), mk(0.3));
        assert!((aggregate(&[mk(0.2), mk(0.4)]).unwrap().rouge1.f1 - 0.3).abs() < 1e-15);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn f1_is_harmonic_mean() {
        let p = Prf::new(0.25, 0.75);
        assert!((p.f1 - 0.375).abs() < 1e-15);
        assert_eq!(Prf::new(0.0, 0.0).f1, 0.0);
    }

    proptest! {
        #[test]
        fn identical_texts_score_one(words in prop::collection::vec("[a-h]{1,3}", 2..30)) {
            let report = score_tokens(&words, &words);
            for v in [report.rouge1.f1, report.rouge2.f1, report.rouge_l.f1] {
                prop_assert!((v - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn components_in_unit_interval_and_lcs_bounded(
            a in prop::collection::vec("[a-d]", 0..20),
            b in prop::collection::vec("[a-d]", 0..20),
        ) {
            let report = score_tokens(&a, &b);
            for v in report.components() {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            let unigram_matches = (report.rouge1.recall * b.len() as f64).round() as usize;
            prop_assert!(lcs_len(&a, &b) <= unigram_matches);
        }

        #[test]
        fn casing_is_irrelevant(text in "[A-Za-z ]{0,40}", reference in "[A-Za-z ]{0,40}") {
            let res = Resources::bundled();
            let opts = RougeOptions::default();
            prop_assert_eq!(
                score(&text, &reference, opts, res),
                score(&text.to_uppercase(), &reference.to_lowercase(), opts, res)
            );
        }

        #[test]
        fn aggregate_ignores_order(values in prop::collection::vec(0.0f64..1.0, 1..20), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let reports: Vec<RougeReport> = values.iter().map(|&v| RougeReport {
                rouge1: Prf::new(v, 1.0 - v), rouge2: Prf::new(v / 2.0, v), rouge_l: Prf::new(v, v),
            }).collect();
            let mut shuffled = reports.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(aggregate(&reports).unwrap(), aggregate(&shuffled).unwrap());
        }
    }
}
