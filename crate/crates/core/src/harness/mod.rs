//! Experiment orchestration: configuration, end-to-end runs, result tables
//! and pre-training corpus preparation.

mod config;
mod experiment;
mod pretrain;
mod table;

pub use config::{ExperimentConfig, SummarizerSpec, KEYS};
pub use experiment::{
    prepare_request, prepare_requests, render_table, run_experiment, run_on_corpus,
    summarize_batch, write_outputs, write_report, ExperimentReport, InstanceRecord, REPORT_FILE,
    TABLE_FILE, TSV_FILE,
};
pub use pretrain::{
    prepare_pretrain_corpus, select_articles, write_pretrain_corpus, ManifestEntry,
    PretrainManifest, PretrainOptions, Selection, MANIFEST_FILE,
};
pub use table::{format_score, render_rows, RenderedTable, TableRow, HEADER};
