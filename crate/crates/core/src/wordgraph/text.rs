//! Sentence splitting, tokenization and rule-based tagging.

use serde::{Deserialize, Serialize};

use super::lexicon::{Pos, Resources};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub surface: String,
    pub lower: String,
    pub pos: Pos,
    pub is_stopword: bool,
}

impl TaggedToken {
    pub fn is_punct(&self) -> bool {
        self.pos == Pos::Punct
    }

    /// Counts toward a candidate's content length.
    pub fn is_content(&self) -> bool {
        !self.is_stopword && !self.is_punct()
    }
}

/// Position of a sentence inside a cluster: (utterance index, sentence index).
pub type Origin = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSentence {
    pub tokens: Vec<TaggedToken>,
    pub origin: Origin,
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '?' | '!')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201d}' | '\u{2019}')
}

/// Splits an utterance into sentences at `.`, `?` or `!` runs followed by
/// whitespace or end of text. A lone period after a listed abbreviation does
/// not end a sentence.
pub fn split_sentences(text: &str, res: &Resources) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        let (_, c) = chars[i];
        if !is_terminal(c) {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < chars.len() && is_terminal(chars[i].1) {
            i += 1;
        }
        let run_len = i - run_start;
        while i < chars.len() && is_closer(chars[i].1) {
            i += 1;
        }
        let at_boundary = i == chars.len() || chars[i].1.is_whitespace();
        if !at_boundary {
            continue;
        }
        if run_len == 1 && chars[run_start].1 == '.' {
            let word_start = text[..chars[run_start].0]
                .rfind(char::is_whitespace)
                .map_or(0, |p| p + 1);
            let word = text[word_start..chars[run_start].0]
                .trim_start_matches(|c: char| !c.is_alphanumeric());
            if !word.is_empty() && res.is_abbreviation(word) {
                continue;
            }
        }
        let end = chars.get(i).map_or(text.len(), |&(b, _)| b);
        let sentence = text[start..end].trim();
        if !sentence.is_empty() {
            sentences.push(sentence.to_string());
        }
        start = end;
    }

    let rest = text[start..].trim();
    if !rest.is_empty() {
        sentences.push(rest.to_string());
    }
    sentences
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-' | '.' | ',' | '_' | '/')
}

/// Splits text into word and punctuation surfaces. Apostrophes, hyphens and
/// periods between alphanumerics stay inside a word ("don't", "e-mail",
/// "3.5"); a trailing period joins the word when the word is a listed
/// abbreviation. Runs of one repeated punctuation character form one token.
pub fn tokenize(text: &str, res: &Resources) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() {
            let start = i;
            i += 1;
            while i < chars.len() {
                if chars[i].is_alphanumeric() {
                    i += 1;
                } else if is_joiner(chars[i])
                    && i + 1 < chars.len()
                    && chars[i + 1].is_alphanumeric()
                    // commas only join digits: "1,000"
                    && (chars[i] != ',' || (chars[i - 1].is_ascii_digit() && chars[i + 1].is_ascii_digit()))
                {
                    i += 2;
                } else {
                    break;
                }
            }
            let mut word: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == '.' && res.is_abbreviation(&word) {
                word.push('.');
                i += 1;
            }
            tokens.push(word);
        } else {
            let start = i;
            while i < chars.len() && chars[i] == c {
                i += 1;
            }
            tokens.push(chars[start..i].iter().collect());
        }
    }
    tokens
}

fn is_numeric(word: &str) -> bool {
    word.chars().any(|c| c.is_ascii_digit())
        && word
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '-' | '/'))
}

const SUFFIX_RULES: &[(&str, usize, Pos)] = &[
    ("n't", 4, Pos::Verb),
    ("ing", 5, Pos::Verb),
    ("ed", 4, Pos::Verb),
    ("ize", 5, Pos::Verb),
    ("ise", 6, Pos::Verb),
    ("ify", 5, Pos::Verb),
    ("ly", 4, Pos::Adv),
    ("ous", 5, Pos::Adj),
    ("ful", 5, Pos::Adj),
    ("able", 6, Pos::Adj),
    ("ible", 6, Pos::Adj),
    ("ive", 5, Pos::Adj),
    ("less", 6, Pos::Adj),
    ("ical", 6, Pos::Adj),
    ("ish", 5, Pos::Adj),
    ("tion", 5, Pos::Noun),
    ("sion", 5, Pos::Noun),
    ("ment", 5, Pos::Noun),
    ("ness", 5, Pos::Noun),
    ("ity", 5, Pos::Noun),
];

/// Lexicon first, then number shape, then suffix rules, then NOUN.
pub fn tag_word(surface: &str, res: &Resources) -> Pos {
    if !surface.chars().any(char::is_alphanumeric) {
        return Pos::Punct;
    }
    let lower = surface.to_lowercase();
    if let Some(pos) = res.lexicon_tag(&lower) {
        return pos;
    }
    if is_numeric(&lower) {
        return Pos::Num;
    }
    let len = lower.chars().count();
    SUFFIX_RULES
        .iter()
        .find(|(suffix, min_len, _)| len >= *min_len && lower.ends_with(suffix))
        .map_or(Pos::Noun, |&(_, _, pos)| pos)
}

pub fn tag_token(surface: &str, res: &Resources) -> TaggedToken {
    let lower = surface.to_lowercase();
    let pos = tag_word(surface, res);
    let is_stopword = res.is_stopword(&lower);
    TaggedToken {
        surface: surface.to_string(),
        lower,
        pos,
        is_stopword,
    }
}

/// Tokenizes and tags one sentence. Blank input is a usage error.
pub fn tag_sentence(text: &str, origin: Origin, res: &Resources) -> Result<TaggedSentence> {
    let tokens: Vec<TaggedToken> = tokenize(text, res)
        .iter()
        .map(|t| tag_token(t, res))
        .collect();
    if tokens.is_empty() {
        return Err(Error::Usage("cannot tag an empty sentence".into()));
    }
    Ok(TaggedSentence { tokens, origin })
}

/// Splits and tags every sentence of an utterance.
pub fn tag_utterance(text: &str, utterance_index: usize, res: &Resources) -> Vec<TaggedSentence> {
    split_sentences(text, res)
        .iter()
        .enumerate()
        .filter_map(|(i, s)| tag_sentence(s, (utterance_index, i), res).ok())
        .collect()
}

fn attaches_left(token: &str) -> bool {
    token.chars().all(|c| {
        matches!(
            c,
            '.' | ',' | '?' | '!' | ';' | ':' | ')' | ']' | '}' | '%' | '\u{201d}'
        )
    })
}

fn attaches_right(token: &str) -> bool {
    token
        .chars()
        .all(|c| matches!(c, '(' | '[' | '{' | '$' | '\u{201c}'))
}

/// Joins surfaces with single spaces, without a space before closing
/// punctuation or after opening brackets.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut glue_next = true;
    for token in tokens {
        let token = token.as_ref();
        if !glue_next && !attaches_left(token) {
            out.push(' ');
        }
        out.push_str(token);
        glue_next = attaches_right(token);
    }
    out
}

/// Number of word (non-punctuation) tokens in `text`.
pub fn word_count(text: &str, res: &Resources) -> usize {
    tokenize(text, res)
        .iter()
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .count()
}
