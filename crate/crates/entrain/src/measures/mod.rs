//! The entrainment measure framework.
//!
//! Every measure consumes a [`FeatureSeries`] — one numeric value per turn
//! for one feature in one conversation — and produces a [`MeasureResult`].
//!
//! Turn-level measures:
//! - **proximity**: per target turn, the distance to the immediately
//!   preceding partner turn against the mean distance to ten seeded-random
//!   non-adjacent partner turns, compared with a paired t-test.
//! - **convergence**: Pearson correlation between adjacent-turn absolute
//!   differences and the turn number, sign-normalized so that shrinking
//!   differences score positive.
//! - **synchrony**: Pearson correlation over adjacent turn pairs from
//!   different speakers.
//!
//! Conversation-level measures compare speaker means: proximity against
//! non-interlocutor speakers across the corpus, convergence between the two
//! halves of each conversation. [`thirds_analysis`] repeats the turn-level
//! measures within the start, middle, and end thirds of a conversation.
//!
//! Missing values are skipped pairwise and never imputed; the reported `n`
//! is always the count actually used. Results are deterministic given
//! (series, seed).

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

mod series;
pub mod stats;

pub use series::{
    csw_amount_series, csw_presence_series, csw_strategy_series, utterance_value_series,
};
pub use stats::{paired_ttest, pearson, sample_sd, strength_label, Correlation, StatError, StatResult};

/// Which entrainment measure a result belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Measure {
    #[serde(rename = "turn_proximity")]
    TurnProximity,
    #[serde(rename = "turn_convergence")]
    TurnConvergence,
    #[serde(rename = "turn_synchrony")]
    TurnSynchrony,
    #[serde(rename = "conv_proximity")]
    ConvProximity,
    #[serde(rename = "conv_convergence")]
    ConvConvergence,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::TurnProximity => "turn_proximity",
            Measure::TurnConvergence => "turn_convergence",
            Measure::TurnSynchrony => "turn_synchrony",
            Measure::ConvProximity => "conv_proximity",
            Measure::ConvConvergence => "conv_convergence",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Weak,
    Moderate,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Positive,
    Negative,
}

/// Result label. Correlation-based measures carry a strength band of the
/// statistic; t-test-based measures carry only the significant direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    /// Strength band of a correlation-like statistic (magnitude + sign).
    Graded { strength: Strength, direction: Direction },
    /// Significant paired-t-test result; positive means entrainment
    /// (partner closer than others / gaps shrinking).
    Detected { direction: Direction },
    NotSignificant,
    /// Preconditions unmet (too few turns, zero variance, ...).
    NotEvaluable,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Graded { strength, direction } => {
                let s = match strength {
                    Strength::Strong => "strong",
                    Strength::Moderate => "moderate",
                    Strength::Weak => "weak",
                };
                let d = match direction {
                    Direction::Positive => "positive",
                    Direction::Negative => "negative",
                };
                write!(f, "{s}_{d}")
            }
            Label::Detected { direction: Direction::Positive } => f.write_str("detected_positive"),
            Label::Detected { direction: Direction::Negative } => f.write_str("detected_negative"),
            Label::NotSignificant => f.write_str("not_significant"),
            Label::NotEvaluable => f.write_str("not_evaluable"),
        }
    }
}

/// One turn's value for one feature. `None` marks a missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnPoint {
    pub turn_index: usize,
    pub speaker_id: String,
    pub value: Option<f64>,
}

/// Per-turn values of one feature in one conversation.
///
/// Turn indices are strictly increasing and speakers alternate.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSeries {
    pub conversation_id: String,
    pub feature: String,
    pub points: Vec<TurnPoint>,
}

impl FeatureSeries {
    pub fn values(&self) -> impl Iterator<Item = (usize, &str, Option<f64>)> {
        self.points.iter().map(|p| (p.turn_index, p.speaker_id.as_str(), p.value))
    }

    fn valued_count(&self) -> usize {
        self.points.iter().filter(|p| p.value.is_some()).count()
    }
}

/// Outcome of one (feature, measure, conversation) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureResult {
    /// `None` for corpus-level measures.
    pub conversation_id: Option<String>,
    pub feature: String,
    pub measure: Measure,
    /// t statistic for t-based measures; the (sign-normalized) correlation
    /// for r-based measures. `None` when not evaluable.
    pub statistic: Option<f64>,
    pub p: Option<f64>,
    /// Number of pairs actually used.
    pub n: usize,
    pub label: Label,
    /// The raw Pearson r for convergence (before sign normalization).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Why a result is not evaluable, when it isn't.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl MeasureResult {
    fn not_evaluable(
        conversation_id: Option<String>,
        feature: &str,
        measure: Measure,
        detail: String,
    ) -> Self {
        Self {
            conversation_id,
            feature: feature.to_string(),
            measure,
            statistic: None,
            p: None,
            n: 0,
            label: Label::NotEvaluable,
            raw_r: None,
            seed: None,
            detail: Some(detail),
        }
    }

    /// Entrainment verdict at `alpha`: significant and in the entraining
    /// direction (positive).
    pub fn entrains(&self, alpha: f64) -> bool {
        let positive = match self.label {
            Label::Graded { direction, .. } | Label::Detected { direction } => {
                direction == Direction::Positive
            }
            _ => false,
        };
        positive && self.p.is_some_and(|p| p < alpha)
    }
}

/// Stable seed derivation so each (conversation, feature) cell gets its own
/// reproducible random stream. FNV-1a over the base seed and the parts.
pub fn derive_seed(base: u64, parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in base.to_le_bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    for part in parts {
        for byte in part.as_bytes() {
            h ^= *byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Number of non-adjacent partner turns sampled per target in
/// [`turn_proximity`].
pub const OTHER_SAMPLE: usize = 10;

/// Turn-level proximity.
///
/// For each target turn the partner difference is the absolute distance to
/// the immediately preceding partner turn (the first turn is skipped); the
/// other difference is the mean distance to `other_sample` seeded-random
/// partner turns that are not adjacent to the target (all of them when fewer
/// exist). A paired t-test over targets compares the two; proximity is
/// inferred when p < alpha and partner differences are smaller.
pub fn turn_proximity(
    s: &FeatureSeries,
    other_sample: usize,
    seed: u64,
    alpha: f64,
) -> MeasureResult {
    let conv = Some(s.conversation_id.clone());
    if s.valued_count() < 12 {
        return MeasureResult::not_evaluable(
            conv,
            &s.feature,
            Measure::TurnProximity,
            format!("needs >= 12 turns with values, got {}", s.valued_count()),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut partner_diffs = Vec::new();
    let mut other_diffs = Vec::new();
    for t in 1..s.points.len() {
        let (Some(v_t), Some(v_p)) = (s.points[t].value, s.points[t - 1].value) else {
            continue;
        };
        let partner_speaker = &s.points[t - 1].speaker_id;
        let pool: Vec<f64> = s
            .points
            .iter()
            .enumerate()
            .filter(|(i, p)| {
                p.speaker_id == *partner_speaker && *i != t - 1 && *i != t + 1 && p.value.is_some()
            })
            .map(|(_, p)| p.value.unwrap())
            .collect();
        if pool.is_empty() {
            continue;
        }
        let sampled: Vec<f64> = if pool.len() <= other_sample {
            pool
        } else {
            pool.choose_multiple(&mut rng, other_sample).copied().collect()
        };
        partner_diffs.push((v_t - v_p).abs());
        other_diffs.push(stats::mean(&sampled.iter().map(|v| (v_t - v).abs()).collect::<Vec<_>>()));
    }

    match paired_ttest(&partner_diffs, &other_diffs) {
        Ok(st) => {
            let closer = stats::mean(&partner_diffs) < stats::mean(&other_diffs);
            let label = if st.p < alpha {
                Label::Detected {
                    direction: if closer { Direction::Positive } else { Direction::Negative },
                }
            } else {
                Label::NotSignificant
            };
            MeasureResult {
                conversation_id: conv,
                feature: s.feature.clone(),
                measure: Measure::TurnProximity,
                statistic: Some(st.statistic),
                p: Some(st.p),
                n: partner_diffs.len(),
                label,
                raw_r: None,
                seed: Some(seed),
                detail: None,
            }
        }
        Err(e) => MeasureResult::not_evaluable(conv, &s.feature, Measure::TurnProximity, e.to_string()),
    }
}

/// Turn-level convergence.
///
/// Correlates the absolute difference between adjacent turns with the turn
/// number, then flips the sign so that shrinking differences (entrainment)
/// score positive. The raw r is kept alongside.
pub fn turn_convergence(s: &FeatureSeries) -> MeasureResult {
    let conv = Some(s.conversation_id.clone());
    let mut diffs = Vec::new();
    let mut turn_numbers = Vec::new();
    for k in 1..s.points.len() {
        if let (Some(prev), Some(cur)) = (s.points[k - 1].value, s.points[k].value) {
            diffs.push((cur - prev).abs());
            turn_numbers.push(s.points[k].turn_index as f64);
        }
    }
    if diffs.len() < 4 {
        return MeasureResult::not_evaluable(
            conv,
            &s.feature,
            Measure::TurnConvergence,
            format!("needs >= 4 adjacent-turn differences, got {}", diffs.len()),
        );
    }
    match pearson(&turn_numbers, &diffs) {
        Ok(c) => {
            let score = -c.r;
            MeasureResult {
                conversation_id: conv,
                feature: s.feature.clone(),
                measure: Measure::TurnConvergence,
                statistic: Some(score),
                p: Some(c.p),
                n: c.n,
                label: strength_label(score),
                raw_r: Some(c.r),
                seed: None,
                detail: None,
            }
        }
        Err(e) => {
            MeasureResult::not_evaluable(conv, &s.feature, Measure::TurnConvergence, e.to_string())
        }
    }
}

/// Turn-level synchrony: Pearson r over adjacent turn pairs from different
/// speakers (in an alternating dyad, every adjacent pair).
pub fn turn_synchrony(s: &FeatureSeries) -> MeasureResult {
    let conv = Some(s.conversation_id.clone());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..s.points.len() {
        if s.points[k - 1].speaker_id == s.points[k].speaker_id {
            continue;
        }
        if let (Some(prev), Some(cur)) = (s.points[k - 1].value, s.points[k].value) {
            xs.push(prev);
            ys.push(cur);
        }
    }
    if xs.len() < 3 {
        return MeasureResult::not_evaluable(
            conv,
            &s.feature,
            Measure::TurnSynchrony,
            format!("needs >= 3 adjacent pairs, got {}", xs.len()),
        );
    }
    match pearson(&xs, &ys) {
        Ok(c) => MeasureResult {
            conversation_id: conv,
            feature: s.feature.clone(),
            measure: Measure::TurnSynchrony,
            statistic: Some(c.r),
            p: Some(c.p),
            n: c.n,
            label: strength_label(c.r),
            raw_r: None,
            seed: None,
            detail: None,
        },
        Err(e) => {
            MeasureResult::not_evaluable(conv, &s.feature, Measure::TurnSynchrony, e.to_string())
        }
    }
}

/// One speaker's conversation-level value of a feature.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerConvValue {
    pub conversation_id: String,
    pub speaker_id: String,
    pub value: f64,
}

/// A corpus-level measure result with its per-conversation verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusMeasure {
    pub result: MeasureResult,
    /// conversation id → this conversation's own entrainment verdict.
    pub per_conversation: BTreeMap<String, bool>,
}

/// Conversation-level proximity across the corpus.
///
/// For each (conversation, speaker) slot: the partner difference is the
/// distance between the two speakers' conversation-level means; the other
/// difference is the mean distance to every speaker in the corpus who was
/// not their interlocutor (the same speaker in another conversation is also
/// excluded). Paired t-test across slots.
pub fn conv_proximity(feature: &str, slots: &[SpeakerConvValue], alpha: f64) -> CorpusMeasure {
    let mut by_conv: BTreeMap<&str, Vec<&SpeakerConvValue>> = BTreeMap::new();
    for slot in slots {
        by_conv.entry(&slot.conversation_id).or_default().push(slot);
    }
    let not_evaluable = |detail: String| CorpusMeasure {
        result: MeasureResult::not_evaluable(None, feature, Measure::ConvProximity, detail),
        per_conversation: BTreeMap::new(),
    };
    if by_conv.len() < 2 {
        return not_evaluable("needs >= 2 conversations to form non-partner pairs".into());
    }

    let mut partner_diffs = Vec::new();
    let mut other_diffs = Vec::new();
    let mut per_slot: BTreeMap<&str, Vec<bool>> = BTreeMap::new();
    for slot in slots {
        let Some(partner) = by_conv[slot.conversation_id.as_str()]
            .iter()
            .find(|s| s.speaker_id != slot.speaker_id)
        else {
            continue;
        };
        let others: Vec<f64> = slots
            .iter()
            .filter(|o| o.conversation_id != slot.conversation_id && o.speaker_id != slot.speaker_id)
            .map(|o| (slot.value - o.value).abs())
            .collect();
        if others.is_empty() {
            continue;
        }
        let pd = (slot.value - partner.value).abs();
        let od = stats::mean(&others);
        partner_diffs.push(pd);
        other_diffs.push(od);
        per_slot.entry(&slot.conversation_id).or_default().push(pd < od);
    }
    if partner_diffs.len() < 2 {
        return not_evaluable("fewer than 2 usable speaker slots".into());
    }

    let per_conversation: BTreeMap<String, bool> = per_slot
        .into_iter()
        .map(|(c, v)| (c.to_string(), v.iter().all(|b| *b)))
        .collect();
    match paired_ttest(&partner_diffs, &other_diffs) {
        Ok(st) => {
            let closer = stats::mean(&partner_diffs) < stats::mean(&other_diffs);
            let label = if st.p < alpha {
                Label::Detected {
                    direction: if closer { Direction::Positive } else { Direction::Negative },
                }
            } else {
                Label::NotSignificant
            };
            CorpusMeasure {
                result: MeasureResult {
                    conversation_id: None,
                    feature: feature.to_string(),
                    measure: Measure::ConvProximity,
                    statistic: Some(st.statistic),
                    p: Some(st.p),
                    n: partner_diffs.len(),
                    label,
                    raw_r: None,
                    seed: None,
                    detail: None,
                },
                per_conversation,
            }
        }
        Err(e) => not_evaluable(e.to_string()),
    }
}

/// Conversation-level convergence across the corpus.
///
/// Splits each conversation's turns into two halves and compares the
/// inter-speaker gap in mean feature value between the halves with a paired
/// t-test over conversations. Conversations missing a speaker in either
/// half are excluded with a diagnostic.
pub fn conv_convergence(feature: &str, series: &[&FeatureSeries], alpha: f64) -> CorpusMeasure {
    let mut gap1 = Vec::new();
    let mut gap2 = Vec::new();
    let mut per_conversation = BTreeMap::new();
    let mut excluded = Vec::new();
    for s in series {
        let n = s.points.len();
        if n < 2 {
            excluded.push(format!("{}: too few turns", s.conversation_id));
            continue;
        }
        let halves = [&s.points[..n / 2], &s.points[n / 2..]];
        let mut gaps = Vec::with_capacity(2);
        for half in halves {
            let mut by_speaker: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
            for p in half {
                if let Some(v) = p.value {
                    by_speaker.entry(&p.speaker_id).or_default().push(v);
                }
            }
            if by_speaker.len() == 2 {
                let means: Vec<f64> = by_speaker.values().map(|v| stats::mean(v)).collect();
                gaps.push((means[0] - means[1]).abs());
            }
        }
        if gaps.len() == 2 {
            per_conversation.insert(s.conversation_id.clone(), gaps[1] < gaps[0]);
            gap1.push(gaps[0]);
            gap2.push(gaps[1]);
        } else {
            excluded.push(format!("{}: speaker absent from a half", s.conversation_id));
        }
    }

    let detail = if excluded.is_empty() { None } else { Some(excluded.join("; ")) };
    match paired_ttest(&gap1, &gap2) {
        Ok(st) => {
            let shrinking = stats::mean(&gap2) < stats::mean(&gap1);
            let label = if st.p < alpha {
                Label::Detected {
                    direction: if shrinking { Direction::Positive } else { Direction::Negative },
                }
            } else {
                Label::NotSignificant
            };
            CorpusMeasure {
                result: MeasureResult {
                    conversation_id: None,
                    feature: feature.to_string(),
                    measure: Measure::ConvConvergence,
                    statistic: Some(st.statistic),
                    p: Some(st.p),
                    n: gap1.len(),
                    label,
                    raw_r: None,
                    seed: None,
                    detail,
                },
                per_conversation,
            }
        }
        Err(e) => CorpusMeasure {
            result: MeasureResult::not_evaluable(
                None,
                feature,
                Measure::ConvConvergence,
                match detail {
                    Some(d) => format!("{e}; excluded: {d}"),
                    None => e.to_string(),
                },
            ),
            per_conversation,
        },
    }
}

/// Position of a third within a conversation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Third {
    Start,
    Middle,
    End,
}

pub const THIRDS: [Third; 3] = [Third::Start, Third::Middle, Third::End];

#[derive(Debug, Clone, PartialEq)]
pub struct ThirdResult {
    pub third: Third,
    pub proximity: MeasureResult,
    pub convergence: MeasureResult,
    pub synchrony: MeasureResult,
}

/// Runs the three turn-level measures within the start, middle, and end
/// thirds of the conversation (equal contiguous blocks; earlier blocks take
/// the remainder). Thirds with fewer than 3 turns are not evaluable.
pub fn thirds_analysis(
    s: &FeatureSeries,
    other_sample: usize,
    seed: u64,
    alpha: f64,
) -> Vec<ThirdResult> {
    let n = s.points.len();
    let base = n / 3;
    let rem = n % 3;
    let mut out = Vec::with_capacity(3);
    let mut offset = 0usize;
    for (i, third) in THIRDS.iter().enumerate() {
        let len = base + usize::from(i < rem);
        let slice = &s.points[offset..offset + len];
        offset += len;
        let sub = FeatureSeries {
            conversation_id: s.conversation_id.clone(),
            feature: s.feature.clone(),
            points: slice.to_vec(),
        };
        let (proximity, convergence, synchrony) = if len < 3 {
            let ne = |m: Measure| {
                MeasureResult::not_evaluable(
                    Some(s.conversation_id.clone()),
                    &s.feature,
                    m,
                    format!("third has {len} turns, needs >= 3"),
                )
            };
            (ne(Measure::TurnProximity), ne(Measure::TurnConvergence), ne(Measure::TurnSynchrony))
        } else {
            (
                turn_proximity(&sub, other_sample, derive_seed(seed, &["third", &i.to_string()]), alpha),
                turn_convergence(&sub),
                turn_synchrony(&sub),
            )
        };
        out.push(ThirdResult { third: *third, proximity, convergence, synchrony });
    }
    out
}
