//! Per-utterance prosody aggregation and per-speaker z-normalization.

use crate::corpus::Utterance;
use crate::measures::stats;

use super::intensity::{extract_intensity, IntensityParams};
use super::pitch::{extract_pitch, PitchParams};
use super::rate::speaking_rate;
use super::voice::jitter_shimmer_hnr;
use super::{
    AudioError, AudioSignal, NormalizedProsody, NormalizedSpeakerVectors, ProsodyField,
    ProsodyVector, SpeakerVectors, PROSODY_FIELDS,
};

fn stats_of(values: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None, None, None);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = stats::mean(values);
    let sd = (values.len() >= 2).then(|| stats::sample_sd(values));
    (Some(min), Some(mean), Some(max), sd)
}

/// Extracts the 12 acoustic-prosodic features for one utterance.
///
/// The span [start, end) is sliced out of the signal; pitch statistics
/// aggregate over voiced frames, intensity over all frames. Utterances too
/// short for the pitch window, or without voiced frames, leave the
/// pitch-based fields missing rather than failing.
pub fn utterance_prosody(
    sig: &AudioSignal,
    utt: &Utterance,
    params: &PitchParams,
) -> Result<ProsodyVector, AudioError> {
    let span = sig.slice(utt.start, utt.end)?;
    let mut v = ProsodyVector::default();

    match extract_pitch(&span, params) {
        Ok(frames) => {
            let voiced: Vec<f64> = frames.iter().filter_map(|f| f.f0).collect();
            let (min, mean, max, sd) = stats_of(&voiced);
            v.set(ProsodyField::PitchMin, min);
            v.set(ProsodyField::PitchMean, mean);
            v.set(ProsodyField::PitchMax, max);
            v.set(ProsodyField::PitchSd, sd);
            let report = jitter_shimmer_hnr(&span, &frames, params);
            v.set(ProsodyField::Jitter, report.jitter);
            v.set(ProsodyField::Shimmer, report.shimmer);
            v.set(ProsodyField::Hnr, report.hnr_db);
        }
        Err(AudioError::TooShortForPitchFloor { .. }) => {
            // Back-channels shorter than the analysis window: pitch-based
            // fields stay missing.
        }
        Err(e) => return Err(e),
    }

    let frames = extract_intensity(&span, &IntensityParams::default());
    let dbs: Vec<f64> = frames.iter().map(|f| f.db).collect();
    let (min, mean, max, sd) = stats_of(&dbs);
    v.set(ProsodyField::IntensityMin, min);
    v.set(ProsodyField::IntensityMean, mean);
    v.set(ProsodyField::IntensityMax, max);
    v.set(ProsodyField::IntensitySd, sd);

    if !utt.tokens.is_empty() {
        v.set(ProsodyField::SpeakingRate, Some(speaking_rate(utt)));
    }
    Ok(v)
}

/// Why a field was left missing during normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZscoreIssue {
    ZeroVariance,
    TooFewValues,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZscoreDiagnostic {
    pub speaker_id: String,
    pub field: ProsodyField,
    pub issue: ZscoreIssue,
}

/// z-scores every field per speaker: (x − mean)/sd with that speaker's
/// corpus-wide sample statistics. Fields with fewer than 2 non-missing
/// values or zero variance stay missing, with a diagnostic.
pub fn zscore_by_speaker(
    per_speaker: &SpeakerVectors,
) -> (NormalizedSpeakerVectors, Vec<ZscoreDiagnostic>) {
    let mut out = NormalizedSpeakerVectors::new();
    let mut diagnostics = Vec::new();
    for (speaker, vectors) in per_speaker {
        let mut normalized = vec![NormalizedProsody::default(); vectors.len()];
        for field in PROSODY_FIELDS {
            let values: Vec<f64> = vectors.iter().filter_map(|v| v.get(field)).collect();
            if values.len() < 2 {
                diagnostics.push(ZscoreDiagnostic {
                    speaker_id: speaker.clone(),
                    field,
                    issue: ZscoreIssue::TooFewValues,
                });
                continue;
            }
            let mean = stats::mean(&values);
            let sd = stats::sample_sd(&values);
            if sd == 0.0 {
                diagnostics.push(ZscoreDiagnostic {
                    speaker_id: speaker.clone(),
                    field,
                    issue: ZscoreIssue::ZeroVariance,
                });
                continue;
            }
            for (i, v) in vectors.iter().enumerate() {
                if let Some(x) = v.get(field) {
                    normalized[i].0.set(field, Some((x - mean) / sd));
                }
            }
        }
        out.insert(speaker.clone(), normalized);
    }
    (out, diagnostics)
}
