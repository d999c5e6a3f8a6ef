//! Assembly of per-turn feature series from per-utterance annotations.
//!
//! Turn value rules: CSW presence is the max over the turn's utterances;
//! CSW amount is switched words over total words in the turn; strategy
//! series are binary indicators (one per strategy); utterance-level numeric
//! features (prosody) aggregate by duration-weighted mean.

use crate::corpus::{Conversation, Turn};
use crate::csw::{CswFeatures, CswStrategy};

use super::{FeatureSeries, TurnPoint};

/// Utterance index ranges per turn, in turn order. Turns partition the
/// utterance list, so ranges are contiguous.
fn turn_ranges(turns: &[Turn]) -> Vec<std::ops::Range<usize>> {
    let mut ranges = Vec::with_capacity(turns.len());
    let mut offset = 0usize;
    for t in turns {
        let len = t.utterances.len();
        ranges.push(offset..offset + len);
        offset += len;
    }
    ranges
}

fn assemble(
    conv: &Conversation,
    turns: &[Turn],
    feature: &str,
    mut turn_value: impl FnMut(std::ops::Range<usize>) -> Option<f64>,
) -> FeatureSeries {
    let points = turn_ranges(turns)
        .into_iter()
        .zip(turns)
        .map(|(range, turn)| TurnPoint {
            turn_index: turn.index,
            speaker_id: turn.speaker_id.clone(),
            value: turn_value(range),
        })
        .collect();
    FeatureSeries { conversation_id: conv.id.clone(), feature: feature.to_string(), points }
}

/// Binary presence of code-switching per turn (max over utterances).
pub fn csw_presence_series(
    conv: &Conversation,
    turns: &[Turn],
    feats: &[Option<CswFeatures>],
) -> FeatureSeries {
    assemble(conv, turns, "csw_presence", |range| {
        let vals: Vec<f64> = range
            .filter_map(|i| feats[i].as_ref())
            .map(|f| if f.presence { 1.0 } else { 0.0 })
            .collect();
        vals.iter().cloned().reduce(f64::max)
    })
}

/// Amount of code-switching per turn: switched words / total words.
pub fn csw_amount_series(
    conv: &Conversation,
    turns: &[Turn],
    feats: &[Option<CswFeatures>],
) -> FeatureSeries {
    assemble(conv, turns, "csw_amount", |range| {
        let mut switched = 0.0f64;
        let mut total = 0.0f64;
        for i in range {
            if let Some(f) = feats[i].as_ref() {
                let words = conv.utterances[i].tokens.len() as f64;
                switched += (f.ratio * words).round();
                total += words;
            }
        }
        (total > 0.0).then(|| switched / total)
    })
}

/// Binary indicator series for one CSW strategy (turn uses it at all).
pub fn csw_strategy_series(
    conv: &Conversation,
    turns: &[Turn],
    feats: &[Option<CswFeatures>],
    strategy: CswStrategy,
) -> FeatureSeries {
    let name = match strategy {
        CswStrategy::Insertional => "csw_strategy_insertional",
        CswStrategy::Alternational => "csw_strategy_alternational",
        CswStrategy::Other => "csw_strategy_other",
    };
    assemble(conv, turns, name, |range| {
        let mut any_features = false;
        let mut hit = false;
        for i in range {
            if let Some(f) = feats[i].as_ref() {
                any_features = true;
                hit |= f.strategies.contains(&strategy);
            }
        }
        any_features.then(|| if hit { 1.0 } else { 0.0 })
    })
}

/// Duration-weighted mean of a per-utterance numeric feature per turn.
/// `values` is parallel to `conv.utterances`; `None` marks missing.
pub fn utterance_value_series(
    conv: &Conversation,
    turns: &[Turn],
    feature: &str,
    values: &[Option<f64>],
) -> FeatureSeries {
    assemble(conv, turns, feature, |range| {
        let mut weighted = 0.0f64;
        let mut weight = 0.0f64;
        for i in range {
            if let Some(v) = values[i] {
                let d = conv.utterances[i].duration();
                weighted += v * d;
                weight += d;
            }
        }
        (weight > 0.0).then(|| weighted / weight)
    })
}
