use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SummarizerSpec};
use super::table::{render_rows, RenderedTable, TableRow};
use crate::bridge::{
    lead_n_summarizer, render_source, run_external_summarizer, SummarizationRequest,
    SummarizationResponse,
};
use crate::compressor::build_short_script;
use crate::corpus::{validate_corpus, Corpus, CorpusStats, QueryInstance};
use crate::error::{Error, Result};
use crate::locator::{extract_spans, prepend_query_turn};
use crate::rouge::{aggregate, score, RougeReport};
use crate::wordgraph::Resources;

pub const REPORT_FILE: &str = "report.json";
pub const TABLE_FILE: &str = "table.txt";
pub const TSV_FILE: &str = "table.tsv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance_id: String,
    /// Exactly what the summarizer received.
    pub source: String,
    pub candidate: String,
    pub rouge: RougeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub label: String,
    pub config: ExperimentConfig,
    pub corpus_stats: CorpusStats,
    pub aggregate: RougeReport,
    pub instances: Vec<InstanceRecord>,
}

impl ExperimentReport {
    pub fn table_row(&self) -> TableRow {
        TableRow {
            label: self.label.clone(),
            rouge: self.aggregate,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, source_name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(source_name, "report", e.to_string()))
    }
}

pub fn render_table(reports: &[ExperimentReport]) -> Result<RenderedTable> {
    render_rows(
        &reports
            .iter()
            .map(ExperimentReport::table_row)
            .collect::<Vec<_>>(),
    )
}

fn with_instance<T>(instance_id: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Instance { .. } => e,
        other => Error::Instance {
            instance_id: instance_id.to_string(),
            source: Box::new(other),
        },
    })
}

/// Locate, optionally prepend the query, optionally compress, and render:
/// everything up to the summarizer for one instance.
pub fn prepare_request(
    corpus: &Corpus,
    instance: &QueryInstance,
    config: &ExperimentConfig,
    res: &Resources,
) -> Result<SummarizationRequest> {
    with_instance(
        &instance.instance_id,
        (|| {
            let meeting = corpus.meeting(&instance.meeting_id).ok_or_else(|| {
                Error::Validation(format!("unknown meeting `{}`", instance.meeting_id))
            })?;
            let mut selection = extract_spans(meeting, instance)?;
            if config.prepend_query {
                selection = prepend_query_turn(selection, &instance.query)?;
            }
            let source = if config.methods.is_empty() {
                render_source(&selection)
            } else {
                render_source(&build_short_script(
                    &selection,
                    &config.methods,
                    &config.constraints,
                    res,
                )?)
            };
            Ok(SummarizationRequest {
                id: instance.instance_id.clone(),
                query: instance.query.clone(),
                source,
            })
        })(),
    )
}

/// Requests for every instance of the configured split, ordered by id.
pub fn prepare_requests(
    corpus: &Corpus,
    config: &ExperimentConfig,
    res: &Resources,
) -> Result<Vec<SummarizationRequest>> {
    let mut instances: Vec<&QueryInstance> = corpus.instances_in(config.split).collect();
    instances.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    instances
        .par_iter()
        .map(|i| prepare_request(corpus, i, config, res))
        .collect()
}

pub fn summarize_batch(
    requests: &[SummarizationRequest],
    spec: &SummarizerSpec,
    references: &BTreeMap<&str, &str>,
    config: &ExperimentConfig,
    res: &Resources,
) -> Result<Vec<SummarizationResponse>> {
    match spec {
        SummarizerSpec::Lead(n) => Ok(requests
            .par_iter()
            .map(|r| lead_n_summarizer(r, *n, res))
            .collect()),
        SummarizerSpec::Exec(cmd) => run_external_summarizer(requests, cmd, config.timeout()),
        SummarizerSpec::EchoReference => requests
            .iter()
            .map(|r| {
                let summary = references
                    .get(r.id.as_str())
                    .ok_or_else(|| Error::Internal(format!("no reference for `{}`", r.id)))?;
                Ok(SummarizationResponse {
                    id: r.id.clone(),
                    summary: summary.to_string(),
                })
            })
            .collect(),
    }
}

/// Runs the experiment on an already loaded corpus. Nothing is written.
pub fn run_on_corpus(
    config: &ExperimentConfig,
    corpus: &Corpus,
    res: &Resources,
) -> Result<ExperimentReport> {
    let corpus_stats = validate_corpus(corpus)?;
    let work = || -> Result<ExperimentReport> {
        let requests = prepare_requests(corpus, config, res)?;
        if requests.is_empty() {
            return Err(Error::Validation(format!(
                "the {} split has no instances",
                config.split
            )));
        }
        let references: BTreeMap<&str, &str> = corpus
            .instances
            .iter()
            .map(|i| (i.instance_id.as_str(), i.reference.as_str()))
            .collect();
        let responses = summarize_batch(&requests, &config.summarizer, &references, config, res)?;
        let instances: Vec<InstanceRecord> = requests
            .into_par_iter()
            .zip(responses)
            .map(|(request, response)| InstanceRecord {
                rouge: score(
                    &response.summary,
                    references[request.id.as_str()],
                    config.rouge,
                    res,
                ),
                instance_id: request.id,
                source: request.source,
                candidate: response.summary,
            })
            .collect();
        let reports: Vec<RougeReport> = instances.iter().map(|i| i.rouge).collect();
        Ok(ExperimentReport {
            label: config.label.clone(),
            config: config.clone(),
            corpus_stats: corpus_stats.clone(),
            aggregate: aggregate(&reports)?,
            instances,
        })
    };
    match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Internal(format!("worker pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Loads and validates the corpus, runs the experiment and, when an output
/// directory is configured, persists the report and its table.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let res = config.resources()?;
    let corpus = Corpus::load(&config.corpus_root)?;
    let report = run_on_corpus(config, &corpus, &res)?;
    if let Some(dir) = &config.output_dir {
        write_report(&report, dir)?;
    }
    Ok(report)
}

/// Writes every file to a temporary name first and renames only once all of
/// them are complete.
pub fn write_outputs(dir: &Path, files: &[(&str, String)]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut staged = Vec::new();
    for (name, contents) in files {
        let tmp = dir.join(format!(".{name}.tmp"));
        if let Err(e) = std::fs::write(&tmp, contents) {
            for (t, _) in &staged {
                let _ = std::fs::remove_file(t);
            }
            return Err(Error::io(&tmp, e));
        }
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, path) in staged {
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    let table = render_table(std::slice::from_ref(report))?;
    write_outputs(
        dir,
        &[
            (REPORT_FILE, report.to_json()),
            (TABLE_FILE, table.text),
            (TSV_FILE, table.tsv),
        ],
    )
}
