//! Conversation data model: tokens, utterances, turns, speakers, corpora.
//!
//! A [`Conversation`] is a time-ordered list of [`Utterance`]s by exactly two
//! speakers (analysis is dyadic; parsing tolerates more). Every token carries
//! a word-level language tag. [`build_turns`] groups maximal runs of
//! consecutive same-speaker utterances into [`Turn`]s so that speakers
//! strictly alternate across turns.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod bangor;
mod interchange;

pub use bangor::{ingest_bangor, BangorOptions};
pub use interchange::{parse_conversation_str, parse_corpus, write_conversation, write_corpus};

/// Word-level language tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lang {
    /// First language of the pair (e.g. Spanish in a Spanish-English corpus).
    #[serde(rename = "l1")]
    Lang1,
    /// Second language of the pair.
    #[serde(rename = "l2")]
    Lang2,
    /// Ambiguous or untaggable word (proper names, hesitations, ...).
    #[serde(rename = "und")]
    Undetermined,
}

/// One transcribed word with its language tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    #[serde(rename = "w")]
    pub surface: String,
    pub lang: Lang,
}

impl Token {
    pub fn new(surface: impl Into<String>, lang: Lang) -> Self {
        Self { surface: surface.into(), lang }
    }
}

/// A time-aligned stretch of speech by one speaker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub speaker_id: String,
    /// Start time in seconds from the beginning of the recording.
    pub start: f64,
    /// End time in seconds; always greater than `start`.
    pub end: f64,
    pub tokens: Vec<Token>,
}

impl Utterance {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    /// True when tokens of both languages occur in this utterance.
    /// Undetermined tokens never count toward code-switching.
    pub fn is_code_switched(&self) -> bool {
        let has_l1 = self.tokens.iter().any(|t| t.lang == Lang::Lang1);
        let has_l2 = self.tokens.iter().any(|t| t.lang == Lang::Lang2);
        has_l1 && has_l2
    }
}

/// Speaker gender as annotated in the corpus metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gender {
    #[serde(rename = "f")]
    Female,
    #[serde(rename = "m")]
    Male,
    #[serde(rename = "u")]
    Unspecified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Speaker {
    pub id: String,
    pub gender: Gender,
}

/// Reference to the recording backing a conversation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioRef {
    /// Path to a WAV file, relative to the corpus directory unless absolute.
    pub path: String,
    /// Maps speaker id to channel index within the file.
    pub channel_map: BTreeMap<String, usize>,
}

/// A maximal run of consecutive utterances by one speaker.
#[derive(Debug, Clone, PartialEq)]
pub struct Turn {
    pub speaker_id: String,
    pub utterances: Vec<Utterance>,
    /// 0-based position of this turn in the conversation.
    pub index: usize,
}

impl Turn {
    pub fn start(&self) -> f64 {
        self.utterances.first().map(|u| u.start).unwrap_or(0.0)
    }

    pub fn duration(&self) -> f64 {
        self.utterances.iter().map(Utterance::duration).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conversation {
    pub id: String,
    pub speakers: Vec<Speaker>,
    /// Utterances sorted by start time (ties: end time, then speaker id).
    pub utterances: Vec<Utterance>,
    pub audio: Option<AudioRef>,
}

impl Conversation {
    pub fn is_dyadic(&self) -> bool {
        self.speakers.len() == 2
    }

    pub fn speaker(&self, id: &str) -> Option<&Speaker> {
        self.speakers.iter().find(|s| s.id == id)
    }

    /// The interlocutor of `id` in a dyadic conversation.
    pub fn partner_of(&self, id: &str) -> Option<&Speaker> {
        if !self.is_dyadic() {
            return None;
        }
        self.speakers.iter().find(|s| s.id != id)
    }

    /// All utterances spoken by `id`, in order.
    pub fn utterances_of<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Utterance> {
        self.utterances.iter().filter(move |u| u.speaker_id == id)
    }

    /// Sorts utterances by start time, ties broken by end time then speaker id.
    /// Overlapping speech is allowed; this fixes a deterministic order.
    pub fn sort_utterances(&mut self) {
        self.utterances.sort_by(|a, b| {
            a.start
                .total_cmp(&b.start)
                .then(a.end.total_cmp(&b.end))
                .then(a.speaker_id.cmp(&b.speaker_id))
        });
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub conversations: Vec<Conversation>,
    pub metadata: BTreeMap<String, String>,
}

impl Corpus {
    pub fn conversation(&self, id: &str) -> Option<&Conversation> {
        self.conversations.iter().find(|c| c.id == id)
    }
}

/// Schema or invariant violations raised while building the data model.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}:{line}: {message}")]
    Schema { file: String, line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate conversation id {0:?}")]
    DuplicateConversation(String),
}

/// Groups maximal runs of consecutive same-speaker utterances into turns.
///
/// The concatenation of the returned turns' utterances equals the
/// conversation's utterance list, and speakers strictly alternate across
/// turns. An empty conversation yields an empty list.
pub fn build_turns(conv: &Conversation) -> Vec<Turn> {
    let mut turns: Vec<Turn> = Vec::new();
    for utt in &conv.utterances {
        match turns.last_mut() {
            Some(turn) if turn.speaker_id == utt.speaker_id => {
                turn.utterances.push(utt.clone());
            }
            _ => {
                turns.push(Turn {
                    speaker_id: utt.speaker_id.clone(),
                    utterances: vec![utt.clone()],
                    index: turns.len(),
                });
            }
        }
    }
    turns
}

/// Retains conversations that are dyadic and contain at least one
/// code-switched utterance. Idempotent.
pub fn filter_dyadic_csw(corpus: &Corpus) -> Corpus {
    Corpus {
        conversations: corpus
            .conversations
            .iter()
            .filter(|c| c.is_dyadic() && c.utterances.iter().any(Utterance::is_code_switched))
            .cloned()
            .collect(),
        metadata: corpus.metadata.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn utt(speaker: &str, start: f64, end: f64, words: &[(&str, Lang)]) -> Utterance {
        Utterance {
            speaker_id: speaker.to_string(),
            start,
            end,
            tokens: words.iter().map(|(w, l)| Token::new(*w, *l)).collect(),
        }
    }

    pub(crate) fn dyad(id: &str, utterances: Vec<Utterance>) -> Conversation {
        let mut speakers: Vec<String> = utterances.iter().map(|u| u.speaker_id.clone()).collect();
        speakers.sort();
        speakers.dedup();
        Conversation {
            id: id.to_string(),
            speakers: speakers
                .into_iter()
                .map(|id| Speaker { id, gender: Gender::Unspecified })
                .collect(),
            utterances,
            audio: None,
        }
    }

    #[test]
    fn turns_group_same_speaker_runs() {
        let conv = dyad(
            "c1",
            vec![
                utt("A", 0.0, 1.0, &[("hola", Lang::Lang1)]),
                utt("A", 1.0, 2.0, &[("pues", Lang::Lang1)]),
                utt("B", 2.0, 3.0, &[("yeah", Lang::Lang2)]),
                utt("A", 3.0, 4.0, &[("ok", Lang::Lang2)]),
            ],
        );
        let turns = build_turns(&conv);
        assert_eq!(turns.len(), 3);
        assert_eq!(turns[0].utterances.len(), 2);
        assert_eq!(turns[1].utterances.len(), 1);
        assert_eq!(turns[2].utterances.len(), 1);
        assert_eq!(turns[0].speaker_id, "A");
        assert_eq!(turns[1].speaker_id, "B");
        assert_eq!(turns[2].speaker_id, "A");
        assert_eq!(turns.iter().map(|t| t.index).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn single_speaker_is_one_turn() {
        let conv = dyad(
            "c1",
            vec![
                utt("A", 0.0, 1.0, &[("a", Lang::Lang1)]),
                utt("A", 1.0, 2.0, &[("b", Lang::Lang1)]),
                utt("A", 2.0, 3.0, &[("c", Lang::Lang1)]),
            ],
        );
        assert_eq!(build_turns(&conv).len(), 1);
    }

    #[test]
    fn alternating_speakers_one_utterance_per_turn() {
        let conv = dyad(
            "c1",
            vec![
                utt("A", 0.0, 1.0, &[("a", Lang::Lang1)]),
                utt("B", 1.0, 2.0, &[("b", Lang::Lang1)]),
                utt("A", 2.0, 3.0, &[("c", Lang::Lang1)]),
                utt("B", 3.0, 4.0, &[("d", Lang::Lang1)]),
            ],
        );
        let turns = build_turns(&conv);
        assert_eq!(turns.len(), 4);
        assert!(turns.iter().all(|t| t.utterances.len() == 1));
    }

    #[test]
    fn turns_partition_utterances() {
        let conv = dyad(
            "c1",
            vec![
                utt("A", 0.0, 1.0, &[("a", Lang::Lang1)]),
                utt("B", 1.0, 2.0, &[("b", Lang::Lang1)]),
                utt("B", 2.0, 3.0, &[("c", Lang::Lang1)]),
                utt("A", 3.0, 4.0, &[("d", Lang::Lang1)]),
            ],
        );
        let turns = build_turns(&conv);
        let total: usize = turns.iter().map(|t| t.utterances.len()).sum();
        assert_eq!(total, conv.utterances.len());
        assert!(turns.iter().all(|t| !t.utterances.is_empty()));
        let flat: Vec<_> = turns.iter().flat_map(|t| t.utterances.clone()).collect();
        assert_eq!(flat, conv.utterances);
        for pair in turns.windows(2) {
            assert_ne!(pair[0].speaker_id, pair[1].speaker_id);
        }
    }

    #[test]
    fn empty_conversation_has_no_turns() {
        let conv = Conversation {
            id: "c0".into(),
            speakers: vec![],
            utterances: vec![],
            audio: None,
        };
        assert!(build_turns(&conv).is_empty());
    }

    #[test]
    fn filter_excludes_non_dyadic() {
        let mut conv = dyad(
            "c1",
            vec![
                utt("A", 0.0, 1.0, &[("hola", Lang::Lang1), ("yeah", Lang::Lang2)]),
                utt("B", 1.0, 2.0, &[("ok", Lang::Lang2)]),
            ],
        );
        conv.speakers.push(Speaker { id: "C".into(), gender: Gender::Unspecified });
        let corpus = Corpus { conversations: vec![conv], metadata: BTreeMap::new() };
        assert!(filter_dyadic_csw(&corpus).conversations.is_empty());
    }

    #[test]
    fn filter_excludes_monolingual_dyads() {
        let conv = dyad(
            "c1",
            vec![
                utt("A", 0.0, 1.0, &[("hola", Lang::Lang1)]),
                utt("B", 1.0, 2.0, &[("adios", Lang::Lang1)]),
            ],
        );
        let corpus = Corpus { conversations: vec![conv], metadata: BTreeMap::new() };
        assert!(filter_dyadic_csw(&corpus).conversations.is_empty());
    }

    #[test]
    fn filter_is_idempotent() {
        let keep = dyad(
            "keep",
            vec![
                utt("A", 0.0, 1.0, &[("hola", Lang::Lang1), ("yeah", Lang::Lang2)]),
                utt("B", 1.0, 2.0, &[("vale", Lang::Lang1)]),
            ],
        );
        let drop = dyad("drop", vec![utt("A", 0.0, 1.0, &[("hola", Lang::Lang1)])]);
        let corpus = Corpus { conversations: vec![keep, drop], metadata: BTreeMap::new() };
        let once = filter_dyadic_csw(&corpus);
        let twice = filter_dyadic_csw(&once);
        assert_eq!(once, twice);
        assert_eq!(once.conversations.len(), 1);
        assert_eq!(once.conversations[0].id, "keep");
    }

    #[test]
    fn undetermined_tokens_do_not_create_csw() {
        let u = utt("A", 0.0, 1.0, &[("hola", Lang::Lang1), ("hm", Lang::Undetermined)]);
        assert!(!u.is_code_switched());
    }

    #[test]
    fn synthetic_corpus_composition() {
        // 56 conversations mirroring the shape of a real mixed corpus:
        // 39 dyadic code-switched, 9 dyadic monolingual, 8 non-dyadic.
        let mut conversations = Vec::new();
        for i in 0..39 {
            conversations.push(dyad(
                &format!("dyad-csw-{i}"),
                vec![
                    utt("A", 0.0, 1.0, &[("hola", Lang::Lang1), ("okay", Lang::Lang2)]),
                    utt("B", 1.0, 2.0, &[("yeah", Lang::Lang2)]),
                ],
            ));
        }
        for i in 0..9 {
            conversations.push(dyad(
                &format!("dyad-mono-{i}"),
                vec![
                    utt("A", 0.0, 1.0, &[("hola", Lang::Lang1)]),
                    utt("B", 1.0, 2.0, &[("buenas", Lang::Lang1)]),
                ],
            ));
        }
        for i in 0..8 {
            let mut conv = dyad(
                &format!("triad-{i}"),
                vec![
                    utt("A", 0.0, 1.0, &[("hola", Lang::Lang1), ("okay", Lang::Lang2)]),
                    utt("B", 1.0, 2.0, &[("yeah", Lang::Lang2)]),
                ],
            );
            conv.speakers.push(Speaker { id: "C".into(), gender: Gender::Unspecified });
            conversations.push(conv);
        }
        let corpus = Corpus { conversations, metadata: BTreeMap::new() };
        assert_eq!(corpus.conversations.len(), 56);
        assert_eq!(filter_dyadic_csw(&corpus).conversations.len(), 39);
    }
}
