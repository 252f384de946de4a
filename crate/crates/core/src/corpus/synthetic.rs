//! Seeded generator for meeting corpora shaped like the public AMI release:
//! design-meeting chatter, filler turns, one general query per meeting and
//! several span-annotated specific queries. Used by tests and demos when the
//! real data is not at hand.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{write_meeting_file, Meeting, QueryInstance, QueryKind, Span, Split, Turn};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub train_meetings: usize,
    pub test_meetings: usize,
    pub train_instances: usize,
    pub test_instances: usize,
    /// Turns per meeting, inclusive range.
    pub turns: (usize, usize),
    pub seed: u64,
}

impl SyntheticSpec {
    /// Same meeting and instance counts as the AMI part of the public release.
    pub fn ami_shaped(seed: u64) -> Self {
        SyntheticSpec {
            train_meetings: 97,
            test_meetings: 20,
            train_instances: 894,
            test_instances: 196,
            turns: (24, 48),
            seed,
        }
    }
}

const SPEAKERS: [&str; 4] = [
    "Project Manager",
    "Marketing",
    "Industrial Designer",
    "User Interface",
];
const SUBJECTS: [&str; 7] = [
    "We",
    "The team",
    "The designer",
    "Marketing",
    "Our users",
    "I",
    "The group",
];
const VERBS: [&str; 9] = [
    "should use",
    "want",
    "need",
    "discussed",
    "prefer",
    "will consider",
    "agreed on",
    "looked at",
    "tested",
];
const ADJECTIVES: [&str; 9] = [
    "new", "cheap", "rubber", "curved", "spongy", "bright", "simple", "large", "solar",
];
const NOUNS: [&str; 10] = [
    "remote control",
    "battery",
    "case",
    "button layout",
    "design",
    "screen",
    "budget",
    "prototype",
    "logo",
    "chip",
];
const TAILS: [&str; 8] = [
    "because the old remote controls break easily",
    "for younger users who watch television every evening",
    "within the production budget of twelve euros",
    "in the final design presented next week",
    "since the market research shows strong demand",
    "",
    "at the end of the project",
    "although the manufacturing costs remain quite high",
];
const FILLERS: [&str; 6] = ["Hmm.", "Right.", "Okay.", "Yeah.", "Um.", "Mm-hmm."];

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn sentence(rng: &mut ChaCha8Rng, noun: &str) -> String {
    let subject = SUBJECTS.choose(rng).expect("nonempty");
    let verb = VERBS.choose(rng).expect("nonempty");
    let adjective = ADJECTIVES.choose(rng).expect("nonempty");
    let tail = TAILS.choose(rng).expect("nonempty");
    let mut s = format!("{subject} {verb} the {adjective} {noun}");
    if !tail.is_empty() {
        s.push(' ');
        s.push_str(tail);
    }
    let end = if rng.gen_bool(0.1) { "?" } else { "." };
    capitalize(&s) + end
}

fn utterance(rng: &mut ChaCha8Rng) -> String {
    if rng.gen_bool(0.2) {
        return FILLERS.choose(rng).expect("nonempty").to_string();
    }
    let noun = *NOUNS.choose(rng).expect("nonempty");
    let count = rng.gen_range(1..=4);
    let mut parts = Vec::with_capacity(count + 1);
    if rng.gen_bool(0.25) {
        parts.push(FILLERS.choose(rng).expect("nonempty").to_string());
    }
    for _ in 0..count {
        // utterances mostly stay on one topic, which gives the word graph
        // something to merge
        let n = if rng.gen_bool(0.7) {
            noun
        } else {
            NOUNS.choose(rng).expect("nonempty")
        };
        parts.push(sentence(rng, n));
    }
    parts.join(" ")
}

fn meeting(
    id: &str,
    split: Split,
    queries: usize,
    spec: &SyntheticSpec,
    rng: &mut ChaCha8Rng,
) -> (Meeting, Vec<QueryInstance>) {
    let n = rng.gen_range(spec.turns.0..=spec.turns.1);
    let turns: Vec<Turn> = (0..n)
        .map(|index| Turn {
            index,
            speaker: SPEAKERS[rng.gen_range(0..SPEAKERS.len())].to_string(),
            content: utterance(rng),
        })
        .collect();
    let topic = *NOUNS.choose(rng).expect("nonempty");
    let mut instances = vec![QueryInstance {
        instance_id: format!("{id}_g000"),
        meeting_id: id.to_string(),
        kind: QueryKind::General,
        query: "Summarize the whole meeting.".into(),
        reference: format!(
            "The group discussed the {topic} and the budget. {}",
            sentence(rng, topic)
        ),
        spans: vec![Span::new(0, n - 1)],
        split,
    }];
    for q in 0..queries.saturating_sub(1) {
        let noun = *NOUNS.choose(rng).expect("nonempty");
        let speaker = SPEAKERS.choose(rng).expect("nonempty");
        let span_count = if rng.gen_bool(0.3) { 2 } else { 1 };
        let spans = (0..span_count)
            .map(|_| {
                let begin = rng.gen_range(0..n);
                let end = (begin + rng.gen_range(0..8)).min(n - 1);
                Span::new(begin, end)
            })
            .collect();
        instances.push(QueryInstance {
            instance_id: format!("{id}_s{q:03}"),
            meeting_id: id.to_string(),
            kind: QueryKind::Specific,
            query: format!(
                "What did the {} say about the {noun}?",
                speaker.to_lowercase()
            ),
            reference: format!(
                "The {} talked about the {noun}. {}",
                speaker.to_lowercase(),
                sentence(rng, noun)
            ),
            spans,
            split,
        });
    }
    (
        Meeting {
            id: id.to_string(),
            turns,
            split,
        },
        instances,
    )
}

/// Query counts per meeting: as even as possible, larger counts first.
fn distribute(instances: usize, meetings: usize) -> Vec<usize> {
    let base = instances / meetings;
    let extra = instances % meetings;
    (0..meetings)
        .map(|i| base + usize::from(i < extra))
        .collect()
}

/// Meetings and instances in memory, in file-name order per split.
pub fn generate(spec: &SyntheticSpec) -> Result<Vec<(Meeting, Vec<QueryInstance>)>> {
    for (split, meetings, instances) in [
        (Split::Train, spec.train_meetings, spec.train_instances),
        (Split::Test, spec.test_meetings, spec.test_instances),
    ] {
        if instances < meetings || (meetings == 0 && instances > 0) {
            return Err(Error::Usage(format!(
                "{split}: {instances} instances cannot cover {meetings} meetings with at least one query each"
            )));
        }
    }
    if spec.turns.0 == 0 || spec.turns.0 > spec.turns.1 {
        return Err(Error::Usage(
            "turn range must be nonempty and start at 1 or more".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::new();
    let mut next_id = 0;
    for (split, meetings, instances) in [
        (Split::Train, spec.train_meetings, spec.train_instances),
        (Split::Test, spec.test_meetings, spec.test_instances),
    ] {
        if meetings == 0 {
            continue;
        }
        for queries in distribute(instances, meetings) {
            let id = format!("SY{next_id:04}");
            next_id += 1;
            out.push(meeting(&id, split, queries, spec, &mut rng));
        }
    }
    Ok(out)
}

/// Writes the corpus under `root/train` and `root/test`.
pub fn write_synthetic_corpus(root: &Path, spec: &SyntheticSpec) -> Result<()> {
    for (meeting, instances) in generate(spec)? {
        let dir = root.join(meeting.split.as_str());
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join(format!("{}.json", meeting.id));
        std::fs::write(&path, write_meeting_file(&meeting, &instances))
            .map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
