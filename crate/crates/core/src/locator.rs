//! Builds the text a summarizer sees for one instance from the gold spans.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{Meeting, QueryInstance};
use crate::error::{Error, Result};

/// Speaker label of the injected query turn. Reserved: real meetings should
/// not use it.
pub const QUESTIONER: &str = "questioner";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedTurn {
    /// Index in the source meeting; `None` for the injected query turn.
    pub origin: Option<usize>,
    pub speaker: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanSelection {
    pub instance_id: String,
    pub turns: Vec<SelectedTurn>,
    pub query_prepended: bool,
}

/// Turns covered by the union of the instance's inclusive spans, in meeting
/// order, each at most once.
pub fn extract_spans(meeting: &Meeting, instance: &QueryInstance) -> Result<SpanSelection> {
    if instance.meeting_id != meeting.id {
        return Err(Error::Usage(format!(
            "instance `{}` belongs to meeting `{}`, not `{}`",
            instance.instance_id, instance.meeting_id, meeting.id
        )));
    }
    let mut indices = BTreeSet::new();
    for span in &instance.spans {
        if !span.is_within(meeting.turns.len()) {
            return Err(Error::Validation(format!(
                "instance `{}`: span {span} outside meeting of {} turns",
                instance.instance_id,
                meeting.turns.len()
            )));
        }
        indices.extend(span.begin..=span.end);
    }
    let turns = indices
        .into_iter()
        .map(|i| {
            let turn = &meeting.turns[i];
            SelectedTurn {
                origin: Some(turn.index),
                speaker: turn.speaker.clone(),
                content: turn.content.clone(),
            }
        })
        .collect();
    Ok(SpanSelection {
        instance_id: instance.instance_id.clone(),
        turns,
        query_prepended: false,
    })
}

/// Inserts the query as the opening utterance of a fictive `questioner`.
pub fn prepend_query_turn(selection: SpanSelection, query: &str) -> Result<SpanSelection> {
    if selection.query_prepended {
        return Err(Error::Usage(format!(
            "query already prepended to `{}`",
            selection.instance_id
        )));
    }
    let mut turns = Vec::with_capacity(selection.turns.len() + 1);
    turns.push(SelectedTurn {
        origin: None,
        speaker: QUESTIONER.to_string(),
        content: query.to_string(),
    });
    turns.extend(selection.turns);
    Ok(SpanSelection {
        instance_id: selection.instance_id,
        turns,
        query_prepended: true,
    })
}
