use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use meetsum_core::bridge::render_source;
use meetsum_core::compressor::CompressionMethod;
use meetsum_core::corpus::{write_synthetic_corpus, Corpus, Split, SyntheticSpec};
use meetsum_core::harness::{
    prepare_pretrain_corpus, render_table, run_experiment, run_on_corpus, ExperimentConfig,
    PretrainManifest, PretrainOptions, Selection, SummarizerSpec, MANIFEST_FILE, REPORT_FILE,
    TABLE_FILE, TSV_FILE,
};
use meetsum_core::locator::extract_spans;
use meetsum_core::wordgraph::Resources;
use meetsum_core::Error;

// integration tests run from the package root, so relative paths keep the
// config echo in golden reports machine-independent
const CORPUS: &str = "tests/fixtures/corpus";

fn fixture_spec() -> SyntheticSpec {
    SyntheticSpec {
        train_meetings: 2,
        test_meetings: 3,
        train_instances: 5,
        test_instances: 10,
        turns: (6, 14),
        seed: 2024,
    }
}

fn updating() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some()
}

fn listing(root: &Path) -> Vec<(PathBuf, String)> {
    let mut out = Vec::new();
    for split in ["train", "test"] {
        let dir = root.join(split);
        let mut files: Vec<PathBuf> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        for f in files {
            out.push((
                f.strip_prefix(root).unwrap().to_path_buf(),
                fs::read_to_string(&f).unwrap(),
            ));
        }
    }
    out
}

#[test]
fn fixture_corpus_matches_generator() {
    if updating() {
        let _ = fs::remove_dir_all(CORPUS);
        write_synthetic_corpus(Path::new(CORPUS), &fixture_spec()).unwrap();
    }
    let tmp = tempfile::tempdir().unwrap();
    write_synthetic_corpus(tmp.path(), &fixture_spec()).unwrap();
    assert_eq!(listing(Path::new(CORPUS)), listing(tmp.path()));
}

fn config(summarizer: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.set("corpus_root", CORPUS).unwrap();
    c.set("summarizer", summarizer).unwrap();
    c
}

fn corpus() -> Corpus {
    Corpus::load(Path::new(CORPUS)).unwrap()
}

#[test]
fn echo_reference_scores_one() {
    let report = run_on_corpus(&config("echo-reference"), &corpus(), Resources::bundled()).unwrap();
    assert_eq!(report.instances.len(), 10);
    for v in [
        report.aggregate.rouge1.f1,
        report.aggregate.rouge2.f1,
        report.aggregate.rouge_l.f1,
    ] {
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }
}

#[test]
fn baseline_sources_are_the_rendered_spans() {
    let corpus = corpus();
    let report = run_on_corpus(&config("lead:2"), &corpus, Resources::bundled()).unwrap();
    let expected_ids: Vec<&str> = {
        let mut ids: Vec<&str> = corpus
            .instances_in(Split::Test)
            .map(|i| i.instance_id.as_str())
            .collect();
        ids.sort();
        ids
    };
    let ids: Vec<&str> = report
        .instances
        .iter()
        .map(|r| r.instance_id.as_str())
        .collect();
    assert_eq!(ids, expected_ids);
    for record in &report.instances {
        let instance = corpus
            .instances
            .iter()
            .find(|i| i.instance_id == record.instance_id)
            .unwrap();
        let meeting = corpus.meeting(&instance.meeting_id).unwrap();
        assert_eq!(
            record.source,
            render_source(&extract_spans(meeting, instance).unwrap())
        );
    }
    let means: Vec<f64> = report.instances.iter().map(|r| r.rouge.rouge1.f1).collect();
    let mean = means.iter().sum::<f64>() / means.len() as f64;
    assert!((report.aggregate.rouge1.f1 - mean).abs() < 1e-12);
}

#[test]
fn prepended_query_opens_every_source() {
    let mut c = config("lead:1");
    c.prepend_query = true;
    c.methods = CompressionMethod::COMBINED.to_vec();
    let corpus = corpus();
    let report = run_on_corpus(&c, &corpus, Resources::bundled()).unwrap();
    for record in &report.instances {
        let instance = corpus
            .instances
            .iter()
            .find(|i| i.instance_id == record.instance_id)
            .unwrap();
        assert_eq!(
            record.source.lines().next().unwrap(),
            format!("questioner: {}", instance.query)
        );
        assert_eq!(record.candidate, instance.query);
    }
}

#[test]
fn reports_are_byte_identical_and_match_the_golden_file() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = config("lead:3");
    c.label = "clustering".into();
    c.methods = CompressionMethod::COMBINED.to_vec();
    c.prepend_query = true;
    let mut reports = Vec::new();
    for (run, jobs) in [(1, 1), (2, 3)] {
        c.output_dir = Some(tmp.path().join(format!("run{run}")));
        c.jobs = Some(jobs);
        run_experiment(&c).unwrap();
        reports.push(
            fs::read_to_string(tmp.path().join(format!("run{run}")).join(REPORT_FILE)).unwrap(),
        );
    }
    assert_eq!(reports[0], reports[1]);
    let golden = Path::new("tests/fixtures/report.golden.json");
    if updating() {
        fs::write(golden, &reports[0]).unwrap();
    }
    assert_eq!(reports[0], fs::read_to_string(golden).unwrap());

    let table = fs::read_to_string(tmp.path().join("run1").join(TABLE_FILE)).unwrap();
    assert!(table.starts_with("Model"));
    assert!(table.lines().nth(1).unwrap().starts_with("clustering"));
    assert!(tmp.path().join("run1").join(TSV_FILE).exists());
}

#[test]
fn failed_runs_write_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = config("exec:cat >/dev/null; exit 1");
    c.output_dir = Some(tmp.path().join("out"));
    let err = run_experiment(&c).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(!tmp.path().join("out").join(REPORT_FILE).exists());
}

#[test]
fn table_rows_follow_report_order() {
    let corpus = corpus();
    let res = Resources::bundled();
    let mut a = config("lead:1");
    a.label = "lead-1".into();
    let mut b = config("lead:3");
    b.label = "lead-3".into();
    let reports = vec![
        run_on_corpus(&a, &corpus, res).unwrap(),
        run_on_corpus(&b, &corpus, res).unwrap(),
    ];
    let table = render_table(&reports).unwrap();
    let labels: Vec<&str> = table
        .text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(labels, ["lead-1", "lead-3"]);
    assert_eq!(table.tsv.lines().count(), 3);
}

#[test]
fn config_file_with_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("exp.conf");
    fs::write(
        &path,
        format!("corpus_root = {CORPUS}\nsummarizer = echo-reference\nlabel = upper\n"),
    )
    .unwrap();
    let mut c = ExperimentConfig::from_file(&path).unwrap();
    assert_eq!(c.summarizer, SummarizerSpec::EchoReference);
    c.set("label", "cli-wins").unwrap();
    let report = run_on_corpus(&c, &corpus(), Resources::bundled()).unwrap();
    assert_eq!(report.label, "cli-wins");
}

#[test]
fn invalid_span_names_instance() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("test");
    fs::create_dir_all(&dir).unwrap();
    fs::write(
        dir.join("bad.json"),
        r#"{"meeting_transcripts":[{"speaker":"A","content":"hi"}],
            "general_query_list":[],
            "specific_query_list":[{"query":"q","answer":"a","relevant_text_span":[["0","4"]]}]}"#,
    )
    .unwrap();
    let mut c = config("lead:1");
    c.corpus_root = tmp.path().to_path_buf();
    let err = run_experiment(&c).unwrap_err();
    assert!(matches!(err, Error::Validation(_)));
    assert!(
        err.to_string().contains("bad_s000") && err.to_string().contains("(0, 4)"),
        "{err}"
    );
}

fn read_manifest(dir: &Path) -> PretrainManifest {
    serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap()
}

#[test]
fn pretrain_corpus_related_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let reference: Vec<_> = corpus()
        .meetings
        .into_iter()
        .filter(|m| m.split == Split::Train)
        .collect();
    let options = PretrainOptions {
        k: 3,
        segment_size: 2,
        selection: Selection::Related,
        ..PretrainOptions::default()
    };
    let res = Resources::bundled();
    let manifest = prepare_pretrain_corpus(
        Path::new("tests/fixtures/news"),
        &reference,
        &options,
        tmp.path(),
        res,
    )
    .unwrap();
    assert_eq!(manifest, read_manifest(tmp.path()));
    assert_eq!(manifest.selected.len(), 3);
    let scores: Vec<f64> = manifest.selected.iter().map(|e| e.score.unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]), "{scores:?}");
    // the remote-control story is closest to design meetings
    assert_eq!(manifest.selected[0].id, "b2");

    let written = Corpus::load(tmp.path()).unwrap();
    assert_eq!(written.meetings.len(), 3);
    let b2 = written.meeting("b2").unwrap();
    assert_eq!(b2.turns.len(), 3);
    assert_eq!(b2.turns[0].speaker, "speaker_0");
    let instance = written
        .instances
        .iter()
        .find(|i| i.meeting_id == "b2")
        .unwrap();
    assert_eq!(
        instance.reference,
        "Rubber remote control unveiled Solar cell charges the battery"
    );
}

#[test]
fn pretrain_corpus_random_mode_is_seeded() {
    let res = Resources::bundled();
    let run = |seed: u64| {
        let tmp = tempfile::tempdir().unwrap();
        let options = PretrainOptions {
            k: 2,
            selection: Selection::Random { seed },
            ..PretrainOptions::default()
        };
        prepare_pretrain_corpus(
            Path::new("tests/fixtures/news"),
            &[],
            &options,
            tmp.path(),
            res,
        )
        .unwrap()
    };
    let a = run(9);
    assert_eq!(a.selected.len(), 2);
    assert!(a.selected.iter().all(|e| e.score.is_none()));
    assert_eq!(a, run(9));
    let distinct: BTreeSet<Vec<String>> = (0..20)
        .map(|s| run(s).selected.into_iter().map(|e| e.id).collect())
        .collect();
    assert!(distinct.len() > 1);
}

#[test]
fn pretrain_parse_errors_name_the_file() {
    let news = tempfile::tempdir().unwrap();
    fs::write(
        news.path().join("broken.story"),
        "A body without any highlight marker.",
    )
    .unwrap();
    let out = tempfile::tempdir().unwrap();
    let options = PretrainOptions {
        k: 1,
        selection: Selection::Random { seed: 0 },
        ..PretrainOptions::default()
    };
    let err = prepare_pretrain_corpus(news.path(), &[], &options, out.path(), Resources::bundled())
        .unwrap_err();
    assert!(err.to_string().contains("broken.story"), "{err}");
}
