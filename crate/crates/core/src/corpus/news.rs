//! News stories as pseudo-meetings for summarizer pre-training data.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{Meeting, NewsArticle, QueryInstance, QueryKind, Span, Split, Turn};
use crate::error::{Error, Result};
use crate::wordgraph::{split_sentences, Resources};

pub const DEFAULT_SEGMENT_SIZE: usize = 4;
pub const DEFAULT_PROMPT: &str = "Summarize the article.";

const HIGHLIGHT_MARKER: &str = "@highlight";

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses a story: body text, then one `@highlight` marker per summary
/// sentence.
pub fn parse_news_story(raw: &str, id: &str, res: &Resources) -> Result<NewsArticle> {
    let mut parts = raw.split(HIGHLIGHT_MARKER);
    let body_text = collapse_whitespace(parts.next().unwrap_or_default());
    let highlights: Vec<String> = parts.map(collapse_whitespace).collect();
    if highlights.is_empty() {
        return Err(Error::format(id, "no @highlight markers"));
    }
    if highlights.iter().any(String::is_empty) {
        return Err(Error::format(id, "empty @highlight section"));
    }
    let body = split_sentences(&body_text, res);
    if body.is_empty() {
        return Err(Error::format(id, "empty story body"));
    }
    Ok(NewsArticle {
        id: id.to_string(),
        body,
        highlights,
    })
}

/// Loads every `*.story` file under `dir`, sorted by file name. Errors name
/// the offending file.
pub fn load_news_dir(dir: &Path, res: &Resources) -> Result<Vec<NewsArticle>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "story"));
    paths.sort();
    paths
        .par_iter()
        .map(|path| {
            let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            parse_news_story(&raw, &id, res).map_err(|e| match e {
                Error::Format { message, .. } => Error::format(path.display().to_string(), message),
                other => other,
            })
        })
        .collect()
}

/// Groups body sentences into turns of `segment_size` sentences each, spoken
/// by `speaker_0`, `speaker_1`, ... The highlights become the reference
/// summary of a single whole-meeting query.
pub fn news_to_pseudo_meeting(
    article: &NewsArticle,
    segment_size: usize,
    prompt: &str,
) -> Result<(Meeting, QueryInstance)> {
    if segment_size == 0 {
        return Err(Error::Usage("segment size must be at least 1".into()));
    }
    if article.body.is_empty() || article.highlights.is_empty() {
        return Err(Error::format(
            &article.id,
            "article needs a body and highlights",
        ));
    }
    let turns: Vec<Turn> = article
        .body
        .chunks(segment_size)
        .enumerate()
        .map(|(index, sentences)| Turn {
            index,
            speaker: format!("speaker_{index}"),
            content: sentences.join(" "),
        })
        .collect();
    let instance = QueryInstance {
        instance_id: format!("{}_g000", article.id),
        meeting_id: article.id.clone(),
        kind: QueryKind::General,
        query: prompt.to_string(),
        reference: article.highlights.join(" "),
        spans: vec![Span::new(0, turns.len() - 1)],
        split: Split::Train,
    };
    let meeting = Meeting {
        id: article.id.clone(),
        turns,
        split: Split::Train,
    };
    Ok((meeting, instance))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedArticle<'a> {
    pub article: &'a NewsArticle,
    pub score: f64,
}

type TermCounts = BTreeMap<String, usize>;

fn term_counts<'t>(texts: impl IntoIterator<Item = &'t str>, res: &Resources) -> TermCounts {
    let mut counts = TermCounts::new();
    for text in texts {
        for term in text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
            .filter(|t| !res.is_stopword(t))
        {
            *counts.entry(term).or_default() += 1;
        }
    }
    counts
}

fn weighted(counts: &TermCounts, idf: &BTreeMap<&str, f64>) -> BTreeMap<String, f64> {
    counts
        .iter()
        .map(|(t, &c)| (t.clone(), c as f64 * idf[t.as_str()]))
        .collect()
}

fn norm(v: &BTreeMap<String, f64>) -> f64 {
    v.values().map(|x| x * x).sum::<f64>().sqrt()
}

/// Scores each article by cosine similarity between its tf-idf vector and
/// the centroid of the (unit-normalized) reference meeting vectors, and
/// returns the `k` best, ties broken by article id.
pub fn rank_news_by_relatedness<'a>(
    articles: &'a [NewsArticle],
    reference: &[Meeting],
    k: usize,
    res: &Resources,
) -> Result<Vec<RankedArticle<'a>>> {
    if reference.is_empty() {
        return Err(Error::Usage("reference corpus is empty".into()));
    }
    if k > articles.len() {
        log::warn!(
            "asked for {k} related articles but only {} are available; returning all",
            articles.len()
        );
    }

    let article_terms: Vec<TermCounts> = articles
        .par_iter()
        .map(|a| term_counts(a.body.iter().map(String::as_str), res))
        .collect();
    let meeting_terms: Vec<TermCounts> = reference
        .par_iter()
        .map(|m| term_counts(m.turns.iter().map(|t| t.content.as_str()), res))
        .collect();

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in article_terms.iter().chain(&meeting_terms) {
        for term in doc.keys() {
            *df.entry(term.as_str()).or_default() += 1;
        }
    }
    let docs = (article_terms.len() + meeting_terms.len()) as f64;
    let idf: BTreeMap<&str, f64> = df
        .into_iter()
        .map(|(t, n)| (t, ((1.0 + docs) / (1.0 + n as f64)).ln() + 1.0))
        .collect();

    let mut centroid: BTreeMap<String, f64> = BTreeMap::new();
    for counts in &meeting_terms {
        let v = weighted(counts, &idf);
        let n = norm(&v);
        if n == 0.0 {
            continue;
        }
        for (t, x) in v {
            *centroid.entry(t).or_default() += x / n;
        }
    }
    let meetings = reference.len() as f64;
    centroid.values_mut().for_each(|x| *x /= meetings);
    let centroid_norm = norm(&centroid);

    let mut ranked: Vec<RankedArticle<'a>> = articles
        .iter()
        .zip(&article_terms)
        .map(|(article, counts)| {
            let v = weighted(counts, &idf);
            let n = norm(&v);
            let score = if n == 0.0 || centroid_norm == 0.0 {
                0.0
            } else {
                let dot: f64 = v
                    .iter()
                    .filter_map(|(t, x)| centroid.get(t).map(|c| x * c))
                    .sum();
                dot / (n * centroid_norm)
            };
            RankedArticle { article, score }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.article.id.cmp(&b.article.id))
    });
    ranked.truncate(k);
    Ok(ranked)
}
