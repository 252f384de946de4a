use serde_json::{json, Map, Value};

use super::{Meeting, QueryInstance, QueryKind, Span, Split, Turn};
use crate::error::{Error, Result};

fn field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str, src: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::parse(src, join(path, name), "missing"))
}

fn join(path: &str, name: &str) -> String {
    if path.is_empty() {
        name.to_string()
    } else {
        format!("{path}.{name}")
    }
}

fn as_object<'a>(v: &'a Value, path: &str, src: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::parse(src, path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str, src: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::parse(src, path, "expected an array"))
}

fn string_field(obj: &Map<String, Value>, name: &str, path: &str, src: &str) -> Result<String> {
    field(obj, name, path, src)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::parse(src, join(path, name), "expected a string"))
}

/// Optional list: absent or null reads as empty.
fn list<'a>(obj: &'a Map<String, Value>, name: &str, src: &str) -> Result<&'a [Value]> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(&[]),
        Some(v) => as_array(v, name, src).map(Vec::as_slice),
    }
}

/// Span bounds come as strings in the public release and as integers
/// elsewhere; both are accepted.
fn span_index(v: &Value, path: &str, src: &str) -> Result<usize> {
    let parsed = match v {
        Value::Number(n) => n.as_u64().and_then(|n| usize::try_from(n).ok()),
        Value::String(s) => s.trim().parse::<usize>().ok(),
        _ => None,
    };
    parsed.ok_or_else(|| Error::parse(src, path, format!("expected a turn index, got {v}")))
}

/// Parses one meeting record into the meeting and one instance per query.
pub fn parse_meeting_file(
    raw: &str,
    meeting_id: &str,
    split: Split,
) -> Result<(Meeting, Vec<QueryInstance>)> {
    let src = meeting_id;
    let doc: Value =
        serde_json::from_str(raw).map_err(|e| Error::parse(src, "<document>", e.to_string()))?;
    let root = as_object(&doc, "<document>", src)?;

    let transcript = as_array(
        field(root, "meeting_transcripts", "", src)?,
        "meeting_transcripts",
        src,
    )?;
    if transcript.is_empty() {
        return Err(Error::parse(src, "meeting_transcripts", "no turns"));
    }
    let mut turns = Vec::with_capacity(transcript.len());
    for (index, item) in transcript.iter().enumerate() {
        let path = format!("meeting_transcripts[{index}]");
        let obj = as_object(item, &path, src)?;
        let speaker = string_field(obj, "speaker", &path, src)?;
        if speaker.trim().is_empty() {
            return Err(Error::parse(src, join(&path, "speaker"), "empty speaker"));
        }
        turns.push(Turn {
            index,
            speaker,
            content: string_field(obj, "content", &path, src)?,
        });
    }
    let turn_count = turns.len();

    let mut instances = Vec::new();
    for (i, item) in list(root, "general_query_list", src)?.iter().enumerate() {
        let path = format!("general_query_list[{i}]");
        let obj = as_object(item, &path, src)?;
        instances.push(QueryInstance {
            instance_id: format!("{meeting_id}_g{i:03}"),
            meeting_id: meeting_id.to_string(),
            kind: QueryKind::General,
            query: string_field(obj, "query", &path, src)?,
            reference: string_field(obj, "answer", &path, src)?,
            spans: vec![Span::new(0, turn_count - 1)],
            split,
        });
    }
    for (i, item) in list(root, "specific_query_list", src)?.iter().enumerate() {
        let path = format!("specific_query_list[{i}]");
        let obj = as_object(item, &path, src)?;
        let span_path = join(&path, "relevant_text_span");
        let raw_spans = as_array(
            field(obj, "relevant_text_span", &path, src)?,
            &span_path,
            src,
        )?;
        if raw_spans.is_empty() {
            return Err(Error::parse(src, span_path, "no spans"));
        }
        let instance_id = format!("{meeting_id}_s{i:03}");
        let mut spans = Vec::with_capacity(raw_spans.len());
        for (j, pair) in raw_spans.iter().enumerate() {
            let pair_path = format!("{span_path}[{j}]");
            let bounds = as_array(pair, &pair_path, src)?;
            if bounds.len() != 2 {
                return Err(Error::parse(src, pair_path, "expected [begin, end]"));
            }
            let span = Span::new(
                span_index(&bounds[0], &format!("{pair_path}[0]"), src)?,
                span_index(&bounds[1], &format!("{pair_path}[1]"), src)?,
            );
            if !span.is_within(turn_count) {
                return Err(Error::Validation(format!(
                    "instance `{instance_id}`: span {span} outside meeting of {turn_count} turns"
                )));
            }
            spans.push(span);
        }
        instances.push(QueryInstance {
            instance_id,
            meeting_id: meeting_id.to_string(),
            kind: QueryKind::Specific,
            query: string_field(obj, "query", &path, src)?,
            reference: string_field(obj, "answer", &path, src)?,
            spans,
            split,
        });
    }

    Ok((
        Meeting {
            id: meeting_id.to_string(),
            turns,
            split,
        },
        instances,
    ))
}

/// Serializes a meeting and its instances back into the input format.
/// Specific-query spans are written as string pairs like the public release.
pub fn write_meeting_file(meeting: &Meeting, instances: &[QueryInstance]) -> String {
    let transcripts: Vec<Value> = meeting
        .turns
        .iter()
        .map(|t| json!({ "speaker": t.speaker, "content": t.content }))
        .collect();
    let general: Vec<Value> = instances
        .iter()
        .filter(|i| i.kind == QueryKind::General)
        .map(|i| json!({ "query": i.query, "answer": i.reference }))
        .collect();
    let specific: Vec<Value> = instances
        .iter()
        .filter(|i| i.kind == QueryKind::Specific)
        .map(|i| {
            let spans: Vec<Value> = i
                .spans
                .iter()
                .map(|s| json!([s.begin.to_string(), s.end.to_string()]))
                .collect();
            json!({ "query": i.query, "answer": i.reference, "relevant_text_span": spans })
        })
        .collect();
    let doc = json!({
        "meeting_transcripts": transcripts,
        "general_query_list": general,
        "specific_query_list": specific,
    });
    serde_json::to_string_pretty(&doc).expect("JSON values always serialize")
}
