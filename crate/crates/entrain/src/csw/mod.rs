//! Code-switching features: presence, amount, and strategy per utterance.
//!
//! The matrix language of an utterance is the majority language among words
//! with a determinate tag; words in the other language are the "switched"
//! words. Strategy classification is a stated heuristic approximation of the
//! insertional / alternational / "other" annotation scheme — the rules fire
//! independently, so one utterance can carry several strategies — and every
//! heuristic label can be replaced by a manual override file.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Lang, Utterance};
use crate::lexicon::Lexicon;

mod overrides;
pub use overrides::{apply_overrides, parse_overrides, OverrideRecord};

/// How a code-switch is realized within an utterance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CswStrategy {
    /// One word or a short (≤ 2 token) phrase embedded in the other language.
    #[serde(rename = "insertional", alias = "I")]
    Insertional,
    /// A switch with substantial spans (≥ 3 tokens) of both languages.
    #[serde(rename = "alternational", alias = "A")]
    Alternational,
    /// An edge filler/cue word in the opposite language of an otherwise
    /// monolingual utterance.
    #[serde(rename = "other", alias = "O")]
    Other,
}

/// Whether a strategy label came from the heuristic or a manual annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "heuristic")]
    Heuristic,
    #[serde(rename = "manual")]
    Manual,
}

/// Per-utterance code-switching features.
///
/// `strategies` is empty exactly when the utterance is monolingual (the
/// monolingual marker, encoded −1 in numeric dumps).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CswFeatures {
    pub presence: bool,
    /// Switched (non-matrix-language) words over all words, in [0, 1].
    pub ratio: f64,
    pub strategies: BTreeSet<CswStrategy>,
    pub provenance: Provenance,
}

impl CswFeatures {
    fn monolingual() -> Self {
        Self {
            presence: false,
            ratio: 0.0,
            strategies: BTreeSet::new(),
            provenance: Provenance::Heuristic,
        }
    }
}

#[derive(Debug, Error)]
pub enum CswError {
    #[error("no determinable language: all tokens are tagged undetermined")]
    NoDeterminableLanguage,
    #[error("classify_strategy called on a monolingual utterance")]
    Monolingual,
    #[error("override references unknown targets: {0:?}")]
    DanglingOverrides(Vec<String>),
}

/// Majority language among determinate tokens; ties go to the language of
/// the first determinate token.
pub fn matrix_language(utt: &Utterance) -> Result<Lang, CswError> {
    let mut l1 = 0usize;
    let mut l2 = 0usize;
    let mut first = None;
    for tok in &utt.tokens {
        match tok.lang {
            Lang::Lang1 => l1 += 1,
            Lang::Lang2 => l2 += 1,
            Lang::Undetermined => continue,
        }
        first.get_or_insert(tok.lang);
    }
    match (l1.cmp(&l2), first) {
        (_, None) => Err(CswError::NoDeterminableLanguage),
        (std::cmp::Ordering::Greater, _) => Ok(Lang::Lang1),
        (std::cmp::Ordering::Less, _) => Ok(Lang::Lang2),
        (std::cmp::Ordering::Equal, Some(lang)) => Ok(lang),
    }
}

/// Maximal runs of consecutive tokens in `lang`. Undetermined tokens break
/// spans but still count toward utterance length.
fn spans_of(utt: &Utterance, lang: Lang) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, tok) in utt.tokens.iter().enumerate() {
        if tok.lang == lang {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            spans.push((s, i - 1));
        }
    }
    if let Some(s) = start {
        spans.push((s, utt.tokens.len() - 1));
    }
    spans
}

fn max_span_len(spans: &[(usize, usize)]) -> usize {
    spans.iter().map(|(s, e)| e - s + 1).max().unwrap_or(0)
}

/// True when the edge token at `idx` is an opposite-language filler/cue
/// against the matrix language of the remaining tokens.
fn is_edge_filler(utt: &Utterance, idx: usize, edge_lexicon: &Lexicon) -> bool {
    let tok = &utt.tokens[idx];
    if tok.lang == Lang::Undetermined || !edge_lexicon.contains(&tok.surface) {
        return false;
    }
    let rest = Utterance {
        speaker_id: utt.speaker_id.clone(),
        start: utt.start,
        end: utt.end,
        tokens: utt
            .tokens
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, t)| t.clone())
            .collect(),
    };
    match matrix_language(&rest) {
        Ok(rest_matrix) => tok.lang != rest_matrix,
        Err(_) => false,
    }
}

/// Applies the strategy rules to a code-switched utterance.
///
/// `edge_lexicon` is the union of the filler and cue word lists; it defines
/// which edge words can trigger the "other" strategy. Rules fire
/// independently, so the result may contain several strategies. When neither
/// the edge rule nor the span rules fire, the longest switched span decides:
/// ≥ 3 tokens counts as alternational, shorter as insertional, so every
/// code-switched utterance carries at least one label.
pub fn classify_strategy(
    utt: &Utterance,
    edge_lexicon: &Lexicon,
) -> Result<BTreeSet<CswStrategy>, CswError> {
    if !utt.is_code_switched() {
        return Err(CswError::Monolingual);
    }
    let matrix = matrix_language(utt)?;
    let other_lang = if matrix == Lang::Lang1 { Lang::Lang2 } else { Lang::Lang1 };

    let mut strategies = BTreeSet::new();
    let last = utt.tokens.len() - 1;

    let edge_other = is_edge_filler(utt, 0, edge_lexicon) || is_edge_filler(utt, last, edge_lexicon);
    if edge_other {
        strategies.insert(CswStrategy::Other);
    }

    let switched_spans = spans_of(utt, other_lang);
    let edge_filler_span = |&(s, e): &(usize, usize)| -> bool {
        (s == 0 || e == last)
            && utt.tokens[s..=e].iter().all(|t| edge_lexicon.contains(&t.surface))
    };
    if switched_spans
        .iter()
        .any(|span| span.1 - span.0 + 1 <= 2 && !edge_filler_span(span))
    {
        strategies.insert(CswStrategy::Insertional);
    }

    let matrix_spans = spans_of(utt, matrix);
    if max_span_len(&matrix_spans) >= 3 && max_span_len(&switched_spans) >= 3 {
        strategies.insert(CswStrategy::Alternational);
    }

    if strategies.is_empty() {
        strategies.insert(if max_span_len(&switched_spans) >= 3 {
            CswStrategy::Alternational
        } else {
            CswStrategy::Insertional
        });
    }
    Ok(strategies)
}

/// Computes presence, ratio and strategies for one utterance.
pub fn csw_features(utt: &Utterance, edge_lexicon: &Lexicon) -> Result<CswFeatures, CswError> {
    let matrix = matrix_language(utt)?;
    if !utt.is_code_switched() {
        return Ok(CswFeatures::monolingual());
    }
    let other_lang = if matrix == Lang::Lang1 { Lang::Lang2 } else { Lang::Lang1 };
    let switched = utt.tokens.iter().filter(|t| t.lang == other_lang).count();
    Ok(CswFeatures {
        presence: true,
        ratio: switched as f64 / utt.tokens.len() as f64,
        strategies: classify_strategy(utt, edge_lexicon)?,
        provenance: Provenance::Heuristic,
    })
}

/// Per-conversation CSW features, parallel to each conversation's utterance
/// list. Utterances whose features cannot be computed (all tokens
/// undetermined) hold `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CswTable {
    pub per_conversation: BTreeMap<String, Vec<Option<CswFeatures>>>,
}

impl CswTable {
    pub fn get(&self, conversation_id: &str, utterance_index: usize) -> Option<&CswFeatures> {
        self.per_conversation
            .get(conversation_id)?
            .get(utterance_index)?
            .as_ref()
    }
}

/// Runs the heuristic classifier over a whole corpus.
pub fn annotate_corpus(corpus: &Corpus, edge_lexicon: &Lexicon) -> CswTable {
    let mut table = CswTable::default();
    for conv in &corpus.conversations {
        let feats = conv
            .utterances
            .iter()
            .map(|u| csw_features(u, edge_lexicon).ok())
            .collect();
        table.per_conversation.insert(conv.id.clone(), feats);
    }
    table
}

/// Corpus-level distribution of CSW labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CswStats {
    pub utterances: usize,
    pub monolingual_pct: f64,
    pub code_switched: usize,
    /// Percentages among code-switched utterances; strategies co-occur, so
    /// these may sum to more than 100.
    pub insertional_pct: f64,
    pub alternational_pct: f64,
    pub other_pct: f64,
}

#[derive(Debug, Error)]
#[error("cannot summarize an empty corpus")]
pub struct EmptyCorpus;

/// Summarizes label distribution over all annotated utterances.
pub fn corpus_csw_stats(table: &CswTable) -> Result<CswStats, EmptyCorpus> {
    let mut total = 0usize;
    let mut csw = 0usize;
    let mut by_strategy = [0usize; 3];
    for feats in table.per_conversation.values().flatten().flatten() {
        total += 1;
        if feats.presence {
            csw += 1;
            for s in &feats.strategies {
                by_strategy[match s {
                    CswStrategy::Insertional => 0,
                    CswStrategy::Alternational => 1,
                    CswStrategy::Other => 2,
                }] += 1;
            }
        }
    }
    if total == 0 {
        return Err(EmptyCorpus);
    }
    let pct = |n: usize, d: usize| if d == 0 { 0.0 } else { 100.0 * n as f64 / d as f64 };
    Ok(CswStats {
        utterances: total,
        monolingual_pct: pct(total - csw, total),
        code_switched: csw,
        insertional_pct: pct(by_strategy[0], csw),
        alternational_pct: pct(by_strategy[1], csw),
        other_pct: pct(by_strategy[2], csw),
    })
}
