//! Acoustic-prosodic feature extraction.
//!
//! Twelve features per utterance: min/mean/max/sd of pitch (Hz) and
//! intensity (dB), jitter, shimmer, harmonics-to-noise ratio (dB), and
//! speaking rate (syllables/second). Pitch uses windowed autocorrelation
//! with parabolic peak interpolation; any field can be missing (no voiced
//! frames, too little material). Features are z-normalized per speaker
//! before entrainment analysis, and [`estimate_snr`] checks recording
//! cleanliness against the clean-speech threshold.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

mod intensity;
mod pitch;
mod prosody;
mod rate;
mod snr;
mod voice;
mod wav;

pub use intensity::{extract_intensity, IntensityFrame, IntensityParams};
pub use pitch::{extract_pitch, PitchFrame, PitchParams};
pub use prosody::{utterance_prosody, zscore_by_speaker, ZscoreDiagnostic, ZscoreIssue};
pub use rate::{speaking_rate, syllable_count};
pub use snr::{estimate_snr, CLEAN_SPEECH_SNR_DB};
pub use voice::{jitter_shimmer_hnr, VoiceReport};
pub use wav::read_audio;

/// Mono audio in [−1, 1] at a fixed sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        assert!(sample_rate > 0, "sample rate must be positive");
        Self { samples, sample_rate }
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// The samples within [start, end) seconds.
    pub fn slice(&self, start: f64, end: f64) -> Result<AudioSignal, AudioError> {
        let sr = self.sample_rate as f64;
        let a = (start * sr).round() as usize;
        let b = (end * sr).round() as usize;
        if start < 0.0 || b > self.samples.len() || a >= b {
            return Err(AudioError::SpanOutsideAudio {
                start,
                end,
                duration: self.duration(),
            });
        }
        Ok(AudioSignal { samples: self.samples[a..b].to_vec(), sample_rate: self.sample_rate })
    }
}

/// The 12 acoustic-prosodic features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProsodyField {
    PitchMin,
    PitchMean,
    PitchMax,
    PitchSd,
    IntensityMin,
    IntensityMean,
    IntensityMax,
    IntensitySd,
    Jitter,
    Shimmer,
    Hnr,
    SpeakingRate,
}

pub const PROSODY_FIELDS: [ProsodyField; 12] = [
    ProsodyField::PitchMin,
    ProsodyField::PitchMean,
    ProsodyField::PitchMax,
    ProsodyField::PitchSd,
    ProsodyField::IntensityMin,
    ProsodyField::IntensityMean,
    ProsodyField::IntensityMax,
    ProsodyField::IntensitySd,
    ProsodyField::Jitter,
    ProsodyField::Shimmer,
    ProsodyField::Hnr,
    ProsodyField::SpeakingRate,
];

impl ProsodyField {
    pub fn name(&self) -> &'static str {
        match self {
            ProsodyField::PitchMin => "pitch_min",
            ProsodyField::PitchMean => "pitch_mean",
            ProsodyField::PitchMax => "pitch_max",
            ProsodyField::PitchSd => "pitch_sd",
            ProsodyField::IntensityMin => "intensity_min",
            ProsodyField::IntensityMean => "intensity_mean",
            ProsodyField::IntensityMax => "intensity_max",
            ProsodyField::IntensitySd => "intensity_sd",
            ProsodyField::Jitter => "jitter",
            ProsodyField::Shimmer => "shimmer",
            ProsodyField::Hnr => "hnr",
            ProsodyField::SpeakingRate => "speaking_rate",
        }
    }

    /// Human-readable label used in report tables.
    pub fn label(&self) -> &'static str {
        match self {
            ProsodyField::PitchMin => "Min. pitch",
            ProsodyField::PitchMean => "Mean pitch",
            ProsodyField::PitchMax => "Max. pitch",
            ProsodyField::PitchSd => "SD pitch",
            ProsodyField::IntensityMin => "Min. intensity",
            ProsodyField::IntensityMean => "Mean intensity",
            ProsodyField::IntensityMax => "Max. intensity",
            ProsodyField::IntensitySd => "SD intensity",
            ProsodyField::Jitter => "Jitter",
            ProsodyField::Shimmer => "Shimmer",
            ProsodyField::Hnr => "HNR",
            ProsodyField::SpeakingRate => "Speaking rate",
        }
    }
}

/// One utterance's acoustic-prosodic features; `None` marks a missing field
/// (e.g. no voiced frames for the pitch-based ones).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProsodyVector {
    values: [Option<f64>; 12],
}

impl ProsodyVector {
    pub fn get(&self, field: ProsodyField) -> Option<f64> {
        self.values[field as usize]
    }

    pub fn set(&mut self, field: ProsodyField, value: Option<f64>) {
        self.values[field as usize] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (ProsodyField, Option<f64>)> + '_ {
        PROSODY_FIELDS.iter().map(|f| (*f, self.get(*f)))
    }
}

/// Per-speaker z-scored prosody (dimensionless; each non-missing field has
/// zero mean and unit sample sd over the speaker's utterances).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NormalizedProsody(pub ProsodyVector);

impl NormalizedProsody {
    pub fn get(&self, field: ProsodyField) -> Option<f64> {
        self.0.get(field)
    }
}

/// Per-speaker collections of prosody vectors, keyed by speaker id.
pub type SpeakerVectors = BTreeMap<String, Vec<ProsodyVector>>;
pub type NormalizedSpeakerVectors = BTreeMap<String, Vec<NormalizedProsody>>;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported encoding in {path}: {detail}")]
    UnsupportedEncoding { path: String, detail: String },
    #[error("channel {channel} out of range: {path} has {channels} channel(s)")]
    ChannelOutOfRange { path: String, channel: usize, channels: usize },
    #[error("empty audio signal")]
    EmptySignal,
    #[error("signal ({duration:.3} s) too short for pitch floor (needs {needed:.3} s)")]
    TooShortForPitchFloor { duration: f64, needed: f64 },
    #[error("utterance span [{start:.3}, {end:.3}) outside audio of {duration:.3} s")]
    SpanOutsideAudio { start: f64, end: f64, duration: f64 },
    #[error("signal ({duration:.3} s) too short for SNR estimation (needs 1 s)")]
    TooShortForSnr { duration: f64 },
    #[error("all-silent signal: SNR undefined")]
    AllSilent,
    #[error("degenerate energy distribution: speech/noise split impossible")]
    NoEnergySpread,
}
