//! Lexical entrainment over word classes and overall language use.
//!
//! Word-class entrainment scores two speakers on a word set W as the negated
//! sum of absolute differences of their relative word frequencies:
//!
//! ```text
//! entr(A, B) = −Σ_{w∈W} |count_A(w)/ALL_A − count_B(w)/ALL_B|
//! ```
//!
//! Zero is perfect entrainment; the score is symmetric and bounded in
//! [−2, 0]. Five classes are used: the corpus' top-100 and top-25 words,
//! each conversation's top-25 words, affirmative cue words, and filled
//! pauses (both languages mixed in every class).
//!
//! Overall-language entrainment trains one Kneser-Ney trigram model per
//! speaker side of a conversation and cross-evaluates perplexity in both
//! directions (see [`ngram`]); lower perplexity = greater entrainment.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Conversation, Corpus};
use crate::lexicon::Lexicon;

mod ngram;
pub use ngram::{
    perplexity_from_log_probs, train_trigram_kn, LmError, TrigramLm, BOS, UNK,
};

/// The five word classes of the lexical feature set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum WordClassName {
    #[serde(rename = "top100_corpus")]
    Top100Corpus,
    #[serde(rename = "top25_corpus")]
    Top25Corpus,
    #[serde(rename = "top25_conv")]
    Top25Conv,
    #[serde(rename = "cues")]
    Cues,
    #[serde(rename = "fillers")]
    Fillers,
}

impl WordClassName {
    pub fn as_str(&self) -> &'static str {
        match self {
            WordClassName::Top100Corpus => "top100_corpus",
            WordClassName::Top25Corpus => "top25_corpus",
            WordClassName::Top25Conv => "top25_conv",
            WordClassName::Cues => "cues",
            WordClassName::Fillers => "fillers",
        }
    }
}

/// A named word set. Members iterate in sorted order, which fixes the
/// summation order of the entrainment score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordClass {
    pub name: WordClassName,
    pub members: BTreeSet<String>,
}

/// All five classes for a corpus; the per-conversation top-25 is keyed by
/// conversation id.
#[derive(Debug, Clone)]
pub struct WordClassTable {
    pub top100_corpus: WordClass,
    pub top25_corpus: WordClass,
    pub top25_conv: BTreeMap<String, WordClass>,
    pub cues: WordClass,
    pub fillers: WordClass,
    /// Truncation diagnostics (corpus smaller than the requested N).
    pub warnings: Vec<String>,
}

impl WordClassTable {
    /// The class to score `conversation_id` against, for each class name.
    pub fn class_for(&self, name: WordClassName, conversation_id: &str) -> Option<&WordClass> {
        match name {
            WordClassName::Top100Corpus => Some(&self.top100_corpus),
            WordClassName::Top25Corpus => Some(&self.top25_corpus),
            WordClassName::Top25Conv => self.top25_conv.get(conversation_id),
            WordClassName::Cues => Some(&self.cues),
            WordClassName::Fillers => Some(&self.fillers),
        }
    }
}

pub const ALL_CLASSES: [WordClassName; 5] = [
    WordClassName::Top100Corpus,
    WordClassName::Top25Corpus,
    WordClassName::Top25Conv,
    WordClassName::Cues,
    WordClassName::Fillers,
];

#[derive(Debug, Error)]
pub enum LexError {
    #[error("speaker has no countable words (ALL = 0)")]
    EmptyCounts,
    #[error("no non-partners: corpus has a single conversation")]
    NoNonPartners,
}

/// Case-folds and strips surrounding punctuation. Returns `None` when
/// nothing is left (a bare punctuation token).
pub fn normalize_word(raw: &str) -> Option<String> {
    let w: String = raw.to_lowercase();
    let w = w.trim_matches(|c: char| !c.is_alphanumeric());
    (!w.is_empty()).then(|| w.to_string())
}

fn count_words<'a>(words: impl Iterator<Item = &'a str>, counts: &mut BTreeMap<String, u64>) {
    for raw in words {
        if let Some(w) = normalize_word(raw) {
            *counts.entry(w).or_default() += 1;
        }
    }
}

/// Top-N words by raw frequency (case-folded), ties broken alphabetically.
fn top_n(counts: &BTreeMap<String, u64>, n: usize) -> BTreeSet<String> {
    let mut items: Vec<(&String, &u64)> = counts.iter().collect();
    items.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    items.into_iter().take(n).map(|(w, _)| w.clone()).collect()
}

/// Builds the five word classes from a corpus and the cue/filler lexicons.
pub fn build_word_classes(corpus: &Corpus, cues: &Lexicon, fillers: &Lexicon) -> WordClassTable {
    let mut warnings = Vec::new();
    let mut corpus_counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut top25_conv = BTreeMap::new();
    for conv in &corpus.conversations {
        let mut conv_counts: BTreeMap<String, u64> = BTreeMap::new();
        count_words(
            conv.utterances.iter().flat_map(|u| u.tokens.iter().map(|t| t.surface.as_str())),
            &mut conv_counts,
        );
        if conv_counts.len() < 25 {
            warnings.push(format!(
                "conversation {}: only {} distinct words for top-25",
                conv.id,
                conv_counts.len()
            ));
        }
        for (w, c) in &conv_counts {
            *corpus_counts.entry(w.clone()).or_default() += c;
        }
        top25_conv.insert(
            conv.id.clone(),
            WordClass { name: WordClassName::Top25Conv, members: top_n(&conv_counts, 25) },
        );
    }
    for (n, label) in [(100usize, "top-100"), (25, "top-25")] {
        if corpus_counts.len() < n {
            warnings.push(format!(
                "corpus has only {} distinct words for {label}",
                corpus_counts.len()
            ));
        }
    }
    WordClassTable {
        top100_corpus: WordClass {
            name: WordClassName::Top100Corpus,
            members: top_n(&corpus_counts, 100),
        },
        top25_corpus: WordClass {
            name: WordClassName::Top25Corpus,
            members: top_n(&corpus_counts, 25),
        },
        top25_conv,
        cues: WordClass {
            name: WordClassName::Cues,
            members: cues.words().map(str::to_string).collect(),
        },
        fillers: WordClass {
            name: WordClassName::Fillers,
            members: fillers.words().map(str::to_string).collect(),
        },
        warnings,
    }
}

/// One speaker's word counts within one conversation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeakerCounts {
    counts: BTreeMap<String, u64>,
    /// Total countable words of this speaker in the conversation.
    pub total: u64,
}

impl SpeakerCounts {
    pub fn from_conversation(conv: &Conversation, speaker_id: &str) -> Self {
        let mut counts = BTreeMap::new();
        count_words(
            conv.utterances_of(speaker_id)
                .flat_map(|u| u.tokens.iter().map(|t| t.surface.as_str())),
            &mut counts,
        );
        let total = counts.values().sum();
        Self { counts, total }
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }
}

/// Word-class entrainment: −Σ_{w∈W} |count_A(w)/ALL_A − count_B(w)/ALL_B|.
/// 0 is perfect entrainment; members are summed in sorted order.
pub fn class_entrainment(
    a: &SpeakerCounts,
    b: &SpeakerCounts,
    class: &WordClass,
) -> Result<f64, LexError> {
    if a.total == 0 || b.total == 0 {
        return Err(LexError::EmptyCounts);
    }
    let mut sum = 0.0f64;
    for w in &class.members {
        let fa = a.count(w) as f64 / a.total as f64;
        let fb = b.count(w) as f64 / b.total as f64;
        sum += (fa - fb).abs();
    }
    Ok(-sum)
}

/// Partner score and mean non-partner score for one (conversation, speaker)
/// slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotScore {
    pub conversation_id: String,
    pub speaker_id: String,
    /// Entrainment score against the interlocutor.
    pub partner: f64,
    /// Mean entrainment score against all non-interlocutors.
    pub baseline: f64,
    /// Number of non-partner speakers averaged over.
    pub others: usize,
}

/// Computes partner-vs-non-partner word-class scores for every speaker slot.
///
/// Non-partners are speaker slots from other conversations, excluding slots
/// with the same speaker id. `class_for` selects the word class for the
/// target slot's conversation (per-conversation classes differ).
pub fn nonpartner_baseline<'a>(
    corpus: &Corpus,
    class_for: impl Fn(&str) -> Option<&'a WordClass>,
) -> Result<Vec<SlotScore>, LexError> {
    let dyads: Vec<&Conversation> = corpus.conversations.iter().filter(|c| c.is_dyadic()).collect();
    if dyads.len() < 2 {
        return Err(LexError::NoNonPartners);
    }
    let mut slots: Vec<(&Conversation, String, SpeakerCounts)> = Vec::new();
    for conv in &dyads {
        for sp in &conv.speakers {
            let counts = SpeakerCounts::from_conversation(conv, &sp.id);
            if counts.total > 0 {
                slots.push((conv, sp.id.clone(), counts));
            }
        }
    }

    let mut scores = Vec::new();
    for (conv, speaker_id, counts) in &slots {
        let Some(class) = class_for(&conv.id) else { continue };
        let Some((_, _, partner_counts)) = slots
            .iter()
            .find(|(c, s, _)| c.id == conv.id && s != speaker_id)
        else {
            continue;
        };
        let partner = class_entrainment(counts, partner_counts, class)?;
        let mut other_scores = Vec::new();
        for (oc, os, ocounts) in &slots {
            if oc.id != conv.id && os != speaker_id {
                other_scores.push(class_entrainment(counts, ocounts, class)?);
            }
        }
        if other_scores.is_empty() {
            continue;
        }
        scores.push(SlotScore {
            conversation_id: conv.id.clone(),
            speaker_id: speaker_id.clone(),
            partner,
            baseline: other_scores.iter().sum::<f64>() / other_scores.len() as f64,
            others: other_scores.len(),
        });
    }
    if scores.is_empty() {
        return Err(LexError::NoNonPartners);
    }
    Ok(scores)
}

/// Two directed overall-language entrainment scores for a conversation:
/// the perplexity of each speaker's trigram model on the partner's side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectedLmScore {
    pub conversation_id: String,
    /// Speaker whose transcripts trained the model.
    pub model_speaker: String,
    /// Speaker whose transcripts were scored.
    pub eval_speaker: String,
    pub perplexity: f64,
    /// Entrainment score = −perplexity (higher is more entrained).
    pub score: f64,
}

/// Normalized sentences (one per utterance) for one speaker's side.
pub fn speaker_sentences(conv: &Conversation, speaker_id: &str) -> Vec<Vec<String>> {
    conv.utterances_of(speaker_id)
        .map(|u| u.tokens.iter().filter_map(|t| normalize_word(&t.surface)).collect::<Vec<_>>())
        .filter(|s: &Vec<String>| !s.is_empty())
        .collect()
}

/// Trains one model per speaker side and cross-evaluates both directions.
pub fn lm_entrainment(
    conv: &Conversation,
    include_oov: bool,
) -> Result<(DirectedLmScore, DirectedLmScore), LmError> {
    if !conv.is_dyadic() {
        return Err(LmError::EmptyInput);
    }
    let mut out = Vec::with_capacity(2);
    for (model_sp, eval_sp) in [
        (&conv.speakers[0].id, &conv.speakers[1].id),
        (&conv.speakers[1].id, &conv.speakers[0].id),
    ] {
        let train = speaker_sentences(conv, model_sp);
        let eval = speaker_sentences(conv, eval_sp);
        let lm = train_trigram_kn(&train)?;
        let ppl = lm.perplexity(&eval, include_oov)?;
        out.push(DirectedLmScore {
            conversation_id: conv.id.clone(),
            model_speaker: model_sp.clone(),
            eval_speaker: eval_sp.clone(),
            perplexity: ppl,
            score: -ppl,
        });
    }
    let second = out.pop().expect("two directions");
    let first = out.pop().expect("two directions");
    Ok((first, second))
}

/// Partner vs non-partner perplexity for every directed (conversation,
/// model-speaker) slot: the model's perplexity on its interlocutor against
/// the mean perplexity on every non-interlocutor's side.
pub fn lm_nonpartner_baseline(
    corpus: &Corpus,
    include_oov: bool,
) -> Result<Vec<SlotScore>, LmError> {
    let dyads: Vec<&Conversation> = corpus.conversations.iter().filter(|c| c.is_dyadic()).collect();
    if dyads.len() < 2 {
        return Err(LmError::EmptyInput);
    }
    // Sides: (conversation, speaker, sentences).
    let mut sides: Vec<(&Conversation, String, Vec<Vec<String>>)> = Vec::new();
    for conv in &dyads {
        for sp in &conv.speakers {
            let sents = speaker_sentences(conv, &sp.id);
            if !sents.is_empty() {
                sides.push((conv, sp.id.clone(), sents));
            }
        }
    }
    let mut out = Vec::new();
    for (conv, speaker_id, train) in &sides {
        let Some((_, partner_id, partner_sents)) = sides
            .iter()
            .find(|(c, s, _)| c.id == conv.id && s != speaker_id)
        else {
            continue;
        };
        let _ = partner_id;
        let lm = train_trigram_kn(train)?;
        let partner_ppl = match lm.perplexity(partner_sents, include_oov) {
            Ok(p) => p,
            Err(LmError::NoScoreableTokens) => continue,
            Err(e) => return Err(e),
        };
        let mut others = Vec::new();
        for (oc, os, osents) in &sides {
            if oc.id != conv.id && os != speaker_id {
                match lm.perplexity(osents, include_oov) {
                    Ok(p) => others.push(p),
                    Err(LmError::NoScoreableTokens) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
        if others.is_empty() {
            continue;
        }
        out.push(SlotScore {
            conversation_id: conv.id.clone(),
            speaker_id: speaker_id.clone(),
            partner: -partner_ppl,
            baseline: -(others.iter().sum::<f64>() / others.len() as f64),
            others: others.len(),
        });
    }
    if out.is_empty() {
        return Err(LmError::EmptyInput);
    }
    Ok(out)
}
