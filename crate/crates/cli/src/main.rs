use std::fs;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use meetsum_core::bridge::{
    lead_n_summarizer, parse_jsonl, run_external_summarizer, serve_lines, to_jsonl,
    SummarizationRequest, SummarizationResponse, DEFAULT_TIMEOUT,
};
use meetsum_core::compressor::build_short_script;
use meetsum_core::corpus::{validate_corpus, write_synthetic_corpus, Corpus, Split, SyntheticSpec};
use meetsum_core::harness::{
    prepare_pretrain_corpus, prepare_requests, render_table, run_experiment, write_outputs,
    ExperimentConfig, ExperimentReport, PretrainOptions, Selection,
};
use meetsum_core::locator::{extract_spans, prepend_query_turn};
use meetsum_core::rouge::{aggregate, score, RougeReport};
use meetsum_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "meetsum",
    version,
    about = "Query-based meeting summarization pipeline"
)]
struct Cli {
    /// Flat key = value experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized test utilities (`synth`). Pipeline output never depends on it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for configuration keys shared by the pipeline subcommands.
#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    split: Option<String>,
    /// Comma-separated: filippova, keyphrase, degeneracy, longest, combined, none.
    #[arg(long = "method", alias = "methods")]
    method: Option<String>,
    #[arg(long)]
    prepend_query: bool,
    #[arg(long)]
    min_words: Option<usize>,
    #[arg(long)]
    require_verb: Option<bool>,
    #[arg(long)]
    k_paths: Option<usize>,
    #[arg(long)]
    search_budget: Option<usize>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    abbreviations: Option<PathBuf>,
    #[arg(long)]
    pos_lexicon: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a corpus and print its instance counts.
    Validate {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Emit summarization requests (JSON lines) for a split.
    Prepare {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit one short-script record (JSON lines) per instance.
    Compress {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Answer summarization requests with a builtin or external summarizer.
    Summarize {
        /// `lead:N`.
        #[arg(long, conflicts_with = "exec", required_unless_present = "exec")]
        builtin: Option<String>,
        /// Worker command reading requests on stdin and writing responses on stdout.
        #[arg(long)]
        exec: Option<String>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Batch timeout in seconds for `--exec`.
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Score line-aligned candidate and reference records ({id, summary}).
    Score {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        references: PathBuf,
        #[arg(long)]
        stem: bool,
        #[arg(long)]
        remove_stopwords: bool,
    },
    /// Run a full experiment and write report.json, table.txt and table.tsv.
    Run {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long)]
        label: Option<String>,
        /// `lead:N`, `exec:COMMAND` or `echo-reference`.
        #[arg(long)]
        summarizer: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Convert news stories into a pseudo-meeting pre-training corpus.
    PretrainCorpus {
        /// Directory of `.story` files.
        #[arg(long)]
        news: PathBuf,
        /// Meeting corpus whose train split is the relatedness reference.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = meetsum_core::corpus::DEFAULT_SEGMENT_SIZE)]
        segment_size: usize,
        #[arg(long, default_value = meetsum_core::corpus::DEFAULT_PROMPT)]
        prompt: String,
        #[arg(long, value_enum, default_value_t = Mode::Related)]
        mode: Mode,
        /// Draw seed for `--mode random`.
        #[arg(long, default_value_t = 0)]
        selection_seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a seeded synthetic corpus with the AMI split sizes (test utility).
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the results table of one or more report.json files.
    Report {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Also write table.txt and table.tsv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Related,
    Random,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn base_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(j) = cli.jobs {
        config.set("jobs", &j.to_string())?;
    }
    Ok(config)
}

fn apply_pipeline(config: &mut ExperimentConfig, p: &PipelineArgs) -> Result<()> {
    let path = |p: &Path| p.display().to_string();
    let overrides = [
        ("corpus_root", p.corpus.as_deref().map(path)),
        ("split", p.split.clone()),
        ("methods", p.method.clone()),
        ("prepend_query", p.prepend_query.then(|| "true".to_string())),
        ("min_words", p.min_words.map(|n| n.to_string())),
        ("require_verb", p.require_verb.map(|b| b.to_string())),
        ("k_paths", p.k_paths.map(|n| n.to_string())),
        ("search_budget", p.search_budget.map(|n| n.to_string())),
        ("stopwords", p.stopwords.as_deref().map(path)),
        ("abbreviations", p.abbreviations.as_deref().map(path)),
        ("pos_lexicon", p.pos_lexicon.as_deref().map(path)),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            config.set(key, &v)?;
        }
    }
    Ok(())
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(f),
        None => f(),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}

fn io_error(path: &Path, e: io::Error) -> Error {
    Error::io(path, e)
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn load_validated(root: &Path) -> Result<Corpus> {
    let corpus = Corpus::load(root)?;
    validate_corpus(&corpus)?;
    Ok(corpus)
}

fn run(cli: Cli) -> Result<()> {
    let mut config = base_config(&cli)?;
    match &cli.command {
        Command::Validate { corpus, json } => {
            let root = corpus.clone().unwrap_or_else(|| config.corpus_root.clone());
            let started = std::time::Instant::now();
            let stats = validate_corpus(&Corpus::load(&root)?)?;
            info!("validated {} in {:?}", root.display(), started.elapsed());
            if *json {
                emit(
                    None,
                    &(serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n"),
                )
            } else {
                emit(
                    None,
                    &format!(
                        "meetings {}\ntrain instances {}\ntest instances {}\ntotal instances {}\n",
                        stats.meeting_count,
                        stats.train_instance_count,
                        stats.test_instance_count,
                        stats.total_instances()
                    ),
                )
            }
        }
        Command::Prepare { pipeline, out } => {
            apply_pipeline(&mut config, pipeline)?;
            let res = config.resources()?;
            let corpus = load_validated(&config.corpus_root)?;
            let requests = with_pool(config.jobs, || prepare_requests(&corpus, &config, &res))?;
            emit(out.as_deref(), &to_jsonl(&requests))
        }
        Command::Compress { pipeline, out } => {
            apply_pipeline(&mut config, pipeline)?;
            if config.methods.is_empty() {
                return Err(Error::Usage("compress needs --method".into()));
            }
            let res = config.resources()?;
            let corpus = load_validated(&config.corpus_root)?;
            let mut instances: Vec<_> = corpus.instances_in(config.split).collect();
            instances.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
            let scripts = with_pool(config.jobs, || {
                instances
                    .iter()
                    .map(|instance| {
                        let meeting = corpus
                            .meeting(&instance.meeting_id)
                            .expect("validated corpus");
                        let mut selection = extract_spans(meeting, instance)?;
                        if config.prepend_query {
                            selection = prepend_query_turn(selection, &instance.query)?;
                        }
                        build_short_script(&selection, &config.methods, &config.constraints, &res)
                            .map_err(|e| Error::Instance {
                                instance_id: instance.instance_id.clone(),
                                source: Box::new(e),
                            })
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            emit(out.as_deref(), &to_jsonl(&scripts))
        }
        Command::Summarize {
            builtin,
            exec,
            input,
            out,
            timeout,
        } => {
            let raw = match input {
                Some(path) => read_file(path)?,
                None => {
                    let mut s = String::new();
                    io::stdin()
                        .read_to_string(&mut s)
                        .map_err(|e| io_error(Path::new("<stdin>"), e))?;
                    s
                }
            };
            let responses: Vec<SummarizationResponse> = match (builtin, exec) {
                (Some(spec), _) => {
                    let n = spec
                        .strip_prefix("lead:")
                        .and_then(|n| n.parse::<usize>().ok())
                        .filter(|&n| n > 0)
                        .ok_or_else(|| {
                            Error::Usage(format!("unknown builtin `{spec}` (expected lead:N)"))
                        })?;
                    let res = config.resources()?;
                    let mut buf = Vec::new();
                    serve_lines(BufReader::new(raw.as_bytes()), &mut buf, |r| {
                        lead_n_summarizer(r, n, &res)
                    })?;
                    return emit(
                        out.as_deref(),
                        &String::from_utf8(buf).expect("JSON is UTF-8"),
                    );
                }
                (None, Some(cmd)) => {
                    let requests: Vec<SummarizationRequest> = parse_jsonl(&raw, "requests")?;
                    let limit = timeout.map(Duration::from_secs).unwrap_or(DEFAULT_TIMEOUT);
                    run_external_summarizer(&requests, cmd, limit)?
                }
                (None, None) => {
                    return Err(Error::Usage("summarize needs --builtin or --exec".into()))
                }
            };
            emit(out.as_deref(), &to_jsonl(&responses))
        }
        Command::Score {
            candidates,
            references,
            stem,
            remove_stopwords,
        } => {
            config.rouge.stem |= stem;
            config.rouge.remove_stopwords |= remove_stopwords;
            let res = config.resources()?;
            let cands: Vec<SummarizationResponse> =
                parse_jsonl(&read_file(candidates)?, &candidates.display().to_string())?;
            let refs: Vec<SummarizationResponse> =
                parse_jsonl(&read_file(references)?, &references.display().to_string())?;
            if cands.len() != refs.len() {
                return Err(Error::Validation(format!(
                    "{} candidates but {} references",
                    cands.len(),
                    refs.len()
                )));
            }
            let mut per_instance = Vec::with_capacity(cands.len());
            for (line, (c, r)) in cands.iter().zip(&refs).enumerate() {
                if c.id != r.id {
                    return Err(Error::Validation(format!(
                        "line {}: candidate id `{}` does not match reference id `{}`",
                        line + 1,
                        c.id,
                        r.id
                    )));
                }
                per_instance.push((
                    c.id.clone(),
                    score(&c.summary, &r.summary, config.rouge, &res),
                ));
            }
            let reports: Vec<RougeReport> = per_instance.iter().map(|(_, r)| *r).collect();
            let body = serde_json::json!({
                "instances": per_instance
                    .iter()
                    .map(|(id, r)| serde_json::json!({"id": id, "rouge": r}))
                    .collect::<Vec<_>>(),
                "aggregate": aggregate(&reports)?,
            });
            emit(
                None,
                &(serde_json::to_string_pretty(&body).expect("scores serialize") + "\n"),
            )
        }
        Command::Run {
            pipeline,
            label,
            summarizer,
            out,
            timeout,
        } => {
            apply_pipeline(&mut config, pipeline)?;
            if let Some(v) = label {
                config.set("label", v)?;
            }
            if let Some(v) = summarizer {
                config.set("summarizer", v)?;
            }
            if let Some(v) = out {
                config.set("output_dir", &v.display().to_string())?;
            }
            if let Some(v) = timeout {
                config.set("timeout", &v.to_string())?;
            }
            if config.split != Split::Test {
                log::warn!("evaluating on the {} split", config.split);
            }
            let report = run_experiment(&config)?;
            emit(None, &render_table(std::slice::from_ref(&report))?.text)
        }
        Command::PretrainCorpus {
            news,
            corpus,
            k,
            segment_size,
            prompt,
            mode,
            selection_seed,
            out,
        } => {
            let res = config.resources()?;
            let selection = match mode {
                Mode::Related => Selection::Related,
                Mode::Random => Selection::Random {
                    seed: *selection_seed,
                },
            };
            let reference = match (selection, corpus.as_ref()) {
                (Selection::Random { .. }, _) => Vec::new(),
                (Selection::Related, root) => {
                    let root = root.cloned().unwrap_or_else(|| config.corpus_root.clone());
                    let corpus = load_validated(&root)?;
                    corpus
                        .meetings
                        .into_iter()
                        .filter(|m| m.split == Split::Train)
                        .collect()
                }
            };
            let options = PretrainOptions {
                k: *k,
                segment_size: *segment_size,
                prompt: prompt.clone(),
                selection,
            };
            let manifest = with_pool(config.jobs, || {
                prepare_pretrain_corpus(news, &reference, &options, out, &res)
            })?;
            emit(
                None,
                &format!(
                    "selected {} of {} articles into {}\n",
                    manifest.selected.len(),
                    manifest.available,
                    out.display()
                ),
            )
        }
        Command::Synth { out } => {
            write_synthetic_corpus(out, &SyntheticSpec::ami_shaped(cli.seed))?;
            emit(
                None,
                &format!("wrote synthetic corpus to {}\n", out.display()),
            )
        }
        Command::Report { reports, out } => {
            let loaded = reports
                .iter()
                .map(|p| ExperimentReport::from_json(&read_file(p)?, &p.display().to_string()))
                .collect::<Result<Vec<_>>>()?;
            let table = render_table(&loaded)?;
            if let Some(dir) = out {
                write_outputs(
                    dir,
                    &[("table.txt", table.text.clone()), ("table.tsv", table.tsv)],
                )?;
            }
            emit(None, &table.text)
        }
    }
}
