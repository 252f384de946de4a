//! Pseudo-meeting pre-training corpus from news stories.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::experiment::write_outputs;
use crate::corpus::{
    load_news_dir, news_to_pseudo_meeting, rank_news_by_relatedness, write_meeting_file, Meeting,
    NewsArticle, DEFAULT_PROMPT, DEFAULT_SEGMENT_SIZE,
};
use crate::error::{Error, Result};
use crate::wordgraph::Resources;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Selection {
    /// The `k` articles most similar to the reference meetings.
    Related,
    /// `k` articles drawn uniformly with a fixed seed.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PretrainOptions {
    pub k: usize,
    pub segment_size: usize,
    pub prompt: String,
    pub selection: Selection,
}

impl Default for PretrainOptions {
    fn default() -> Self {
        PretrainOptions {
            k: 15_000,
            segment_size: DEFAULT_SEGMENT_SIZE,
            prompt: DEFAULT_PROMPT.to_string(),
            selection: Selection::Related,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// Relatedness to the reference meetings; absent in random mode.
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PretrainManifest {
    pub options: PretrainOptions,
    pub available: usize,
    pub selected: Vec<ManifestEntry>,
}

/// Picks the articles to convert. Related mode orders by descending score;
/// random mode keeps the draw order, which depends only on the seed and the
/// set of article ids.
pub fn select_articles<'a>(
    articles: &'a [NewsArticle],
    reference: &[Meeting],
    options: &PretrainOptions,
    res: &Resources,
) -> Result<Vec<(&'a NewsArticle, Option<f64>)>> {
    if options.k == 0 {
        return Err(Error::Usage("k must be at least 1".into()));
    }
    match options.selection {
        Selection::Related => Ok(
            rank_news_by_relatedness(articles, reference, options.k, res)?
                .into_iter()
                .map(|r| (r.article, Some(r.score)))
                .collect(),
        ),
        Selection::Random { seed } => {
            if options.k > articles.len() {
                log::warn!(
                    "asked for {} random articles but only {} are available; returning all",
                    options.k,
                    articles.len()
                );
            }
            let mut pool: Vec<&NewsArticle> = articles.iter().collect();
            pool.sort_by(|a, b| a.id.cmp(&b.id));
            pool.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            pool.truncate(options.k);
            Ok(pool.into_iter().map(|a| (a, None)).collect())
        }
    }
}

/// Converts the selected articles and writes them as meeting files under
/// `out/train/`, with the manifest at `out/manifest.json`.
pub fn write_pretrain_corpus(
    articles: &[NewsArticle],
    reference: &[Meeting],
    options: &PretrainOptions,
    out: &Path,
    res: &Resources,
) -> Result<PretrainManifest> {
    let selected = select_articles(articles, reference, options, res)?;
    let mut files = Vec::with_capacity(selected.len());
    let mut entries = Vec::with_capacity(selected.len());
    for (article, score) in &selected {
        let (meeting, instance) =
            news_to_pseudo_meeting(article, options.segment_size, &options.prompt)?;
        files.push((
            format!("{}.json", article.id),
            write_meeting_file(&meeting, &[instance]),
        ));
        entries.push(ManifestEntry {
            id: article.id.clone(),
            score: *score,
        });
    }
    let manifest = PretrainManifest {
        options: options.clone(),
        available: articles.len(),
        selected: entries,
    };
    let named: Vec<(&str, String)> = files.iter().map(|(n, c)| (n.as_str(), c.clone())).collect();
    write_outputs(&out.join("train"), &named)?;
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifests serialize");
    json.push('\n');
    write_outputs(out, &[(MANIFEST_FILE, json)])?;
    Ok(manifest)
}

pub fn prepare_pretrain_corpus(
    news_root: &Path,
    reference: &[Meeting],
    options: &PretrainOptions,
    out: &Path,
    res: &Resources,
) -> Result<PretrainManifest> {
    let articles = load_news_dir(news_root, res)?;
    write_pretrain_corpus(&articles, reference, options, out, res)
}
