//! Summarizer connection: a line-delimited JSON protocol for external worker
//! processes, and a lead-N extractive baseline.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::compressor::ShortScript;
use crate::error::{Error, Result};
use crate::locator::SpanSelection;
use crate::wordgraph::{split_sentences, Resources};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(600);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummarizationRequest {
    pub id: String,
    pub query: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummarizationResponse {
    pub id: String,
    pub summary: String,
}

/// Anything that can be flattened into `speaker: text` lines.
pub trait Transcript {
    fn lines(&self) -> Vec<(&str, &str)>;
}

impl Transcript for SpanSelection {
    fn lines(&self) -> Vec<(&str, &str)> {
        self.turns
            .iter()
            .map(|t| (t.speaker.as_str(), t.content.as_str()))
            .collect()
    }
}

impl Transcript for ShortScript {
    fn lines(&self) -> Vec<(&str, &str)> {
        self.turns
            .iter()
            .map(|t| (t.speaker.as_str(), t.text.as_str()))
            .collect()
    }
}

pub fn render_source<T: Transcript + ?Sized>(transcript: &T) -> String {
    transcript
        .lines()
        .iter()
        .map(|(speaker, text)| format!("{speaker}: {}", one_line(text)))
        .collect::<Vec<_>>()
        .join("\n")
}

// embedded newlines would break the one-line-per-turn layout
fn one_line(text: &str) -> String {
    if text.contains(['\n', '\r']) {
        text.split_whitespace().collect::<Vec<_>>().join(" ")
    } else {
        text.to_string()
    }
}

pub fn write_jsonl<T: Serialize, W: Write>(records: &[T], mut out: W) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Internal(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| Error::io("<output>", e))?;
    }
    out.flush().map_err(|e| Error::io("<output>", e))
}

pub fn to_jsonl<T: Serialize>(records: &[T]) -> String {
    let mut buf = Vec::new();
    write_jsonl(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Parses one record per nonblank line; errors name the line number.
pub fn parse_jsonl<T: for<'de> Deserialize<'de>>(text: &str, source_name: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| Error::parse(source_name, format!("line {}", i + 1), e.to_string()))
        })
        .collect()
}

/// Checks that the responses answer every request exactly once and returns
/// them in request order.
pub fn match_responses(
    requests: &[SummarizationRequest],
    responses: Vec<SummarizationResponse>,
) -> Result<Vec<SummarizationResponse>> {
    let wanted: BTreeSet<&str> = requests.iter().map(|r| r.id.as_str()).collect();
    let mut by_id: BTreeMap<String, SummarizationResponse> = BTreeMap::new();
    let mut duplicate = BTreeSet::new();
    let mut unknown = BTreeSet::new();
    for r in responses {
        if !wanted.contains(r.id.as_str()) {
            unknown.insert(r.id.clone());
        } else if by_id.contains_key(&r.id) {
            duplicate.insert(r.id.clone());
        } else {
            by_id.insert(r.id.clone(), r);
        }
    }
    let missing: Vec<&str> = wanted
        .iter()
        .copied()
        .filter(|id| !by_id.contains_key(*id))
        .collect();
    if !missing.is_empty() || !duplicate.is_empty() || !unknown.is_empty() {
        let mut parts = Vec::new();
        let list = |ids: Vec<&str>| ids.join(", ");
        if !missing.is_empty() {
            parts.push(format!("missing ids [{}]", list(missing)));
        }
        if !duplicate.is_empty() {
            parts.push(format!(
                "duplicate ids [{}]",
                list(duplicate.iter().map(String::as_str).collect())
            ));
        }
        if !unknown.is_empty() {
            parts.push(format!(
                "unknown ids [{}]",
                list(unknown.iter().map(String::as_str).collect())
            ));
        }
        return Err(Error::Protocol(parts.join("; ")));
    }
    Ok(requests
        .iter()
        .map(|r| by_id.remove(&r.id).expect("checked above"))
        .collect())
}

/// Runs `command` through `sh -c`, feeds it the requests as JSON lines on
/// stdin and reads responses from stdout. The whole batch shares one
/// timeout; on expiry the worker is killed.
pub fn run_external_summarizer(
    requests: &[SummarizationRequest],
    command: &str,
    timeout: Duration,
) -> Result<Vec<SummarizationResponse>> {
    let ids: BTreeSet<&str> = requests.iter().map(|r| r.id.as_str()).collect();
    if ids.len() != requests.len() {
        return Err(Error::Usage(
            "request ids must be unique within a batch".into(),
        ));
    }
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| Error::Protocol(format!("cannot start worker `{command}`: {e}")))?;

    let payload = to_jsonl(requests);
    let mut stdin = child.stdin.take().expect("stdin is piped");
    // a worker may exit without draining its input; that surfaces as a
    // protocol error below, not as a write failure here
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(payload.as_bytes());
    });
    let stdout = child.stdout.take().expect("stdout is piped");
    let reader = thread::spawn(move || {
        let mut out = String::new();
        BufReader::new(stdout).read_to_string(&mut out).map(|_| out)
    });

    let started = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if started.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(Error::Timeout(timeout));
            }
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(e) => return Err(Error::Protocol(format!("waiting for worker: {e}"))),
        }
    };
    let _ = writer.join();
    let output = reader
        .join()
        .map_err(|_| Error::Internal("worker reader panicked".into()))?
        .map_err(|e| Error::Protocol(format!("reading worker output: {e}")))?;
    if !status.success() {
        return Err(Error::Protocol(format!(
            "worker `{command}` exited with {status}"
        )));
    }
    let responses = parse_jsonl(&output, "worker output")
        .map_err(|e| Error::Protocol(format!("malformed worker response: {e}")))?;
    match_responses(requests, responses)
}

fn strip_speaker(line: &str) -> &str {
    match line.split_once(": ") {
        Some((_, text)) => text,
        None => line,
    }
}

/// The first `budget` sentences of the source, speaker prefixes removed,
/// joined by single spaces.
pub fn lead_n_summarizer(
    request: &SummarizationRequest,
    budget: usize,
    res: &Resources,
) -> SummarizationResponse {
    let sentences = request
        .source
        .lines()
        .map(strip_speaker)
        .flat_map(|text| split_sentences(text, res))
        .take(budget)
        .collect::<Vec<_>>();
    SummarizationResponse {
        id: request.id.clone(),
        summary: sentences.join(" "),
    }
}

/// Reads JSON-line requests and writes JSON-line responses; used by
/// `summarize` and usable as a standalone worker.
pub fn serve_lines<R: BufRead, W: Write>(
    input: R,
    output: W,
    mut summarize: impl FnMut(&SummarizationRequest) -> SummarizationResponse,
) -> Result<()> {
    let mut text = String::new();
    let mut input = input;
    input
        .read_to_string(&mut text)
        .map_err(|e| Error::io("<input>", e))?;
    let requests: Vec<SummarizationRequest> = parse_jsonl(&text, "requests")?;
    let responses: Vec<SummarizationResponse> = requests.iter().map(&mut summarize).collect();
    write_jsonl(&responses, output)
}
