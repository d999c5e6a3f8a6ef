//! Fundamental frequency estimation by windowed autocorrelation.
//!
//! Per frame: subtract the local mean, apply a Hann window of 3 pitch-floor
//! periods, compute the autocorrelation, and normalize it by the window's
//! own autocorrelation so a perfectly periodic signal peaks near 1
//! regardless of lag. The strongest local maximum between the ceiling and
//! floor lags (parabolically interpolated in both position and height)
//! becomes the frame's candidate; frames whose peak falls below the voicing
//! threshold are unvoiced.

use super::{AudioError, AudioSignal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchParams {
    /// Lowest F0 searched (Hz). Also sets the window length (3 periods).
    pub floor: f64,
    /// Highest F0 searched (Hz).
    pub ceiling: f64,
    /// Frame step (s).
    pub step: f64,
    /// Normalized-autocorrelation threshold below which a frame is unvoiced.
    pub voicing_threshold: f64,
}

impl Default for PitchParams {
    fn default() -> Self {
        Self { floor: 75.0, ceiling: 600.0, step: 0.010, voicing_threshold: 0.45 }
    }
}

/// Per-octave bonus for higher-frequency candidates during selection.
const OCTAVE_COST: f64 = 0.01;

/// One analysis frame: voiced frames carry an F0 estimate and the
/// normalized autocorrelation at the pitch lag (the harmonicity strength).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchFrame {
    /// Frame center (s), relative to the start of the analyzed signal.
    pub time: f64,
    /// Estimated F0 in Hz; `None` when unvoiced.
    pub f0: Option<f64>,
    /// Normalized autocorrelation peak in [0, 1]; 0 for silent frames.
    pub strength: f64,
}

impl PitchFrame {
    pub fn voiced(&self) -> bool {
        self.f0.is_some()
    }
}

fn hann(n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    (0..=max_lag.min(n - 1))
        .map(|lag| x[..n - lag].iter().zip(&x[lag..]).map(|(a, b)| a * b).sum())
        .collect()
}

/// Parabolic vertex through (−1, ym1), (0, y0), (+1, yp1): offset and height.
fn parabolic_vertex(ym1: f64, y0: f64, yp1: f64) -> (f64, f64) {
    let denom = ym1 - 2.0 * y0 + yp1;
    if denom.abs() < 1e-30 {
        return (0.0, y0);
    }
    let delta = 0.5 * (ym1 - yp1) / denom;
    let height = y0 - 0.25 * (ym1 - yp1) * delta;
    if delta.abs() < 1.0 { (delta, height) } else { (0.0, y0) }
}

/// Frame-wise F0 over the whole signal.
///
/// The signal must be at least one window (3/floor seconds) long.
pub fn extract_pitch(sig: &AudioSignal, params: &PitchParams) -> Result<Vec<PitchFrame>, AudioError> {
    if sig.samples.is_empty() {
        return Err(AudioError::EmptySignal);
    }
    let sr = sig.sample_rate as f64;
    assert!(
        params.floor < params.ceiling && params.ceiling < sr / 2.0,
        "need floor < ceiling < sample_rate/2"
    );
    let window_dur = 3.0 / params.floor;
    if sig.duration() < window_dur {
        return Err(AudioError::TooShortForPitchFloor {
            duration: sig.duration(),
            needed: window_dur,
        });
    }

    let window_len = (window_dur * sr).round() as usize;
    let min_lag = (sr / params.ceiling).ceil() as usize;
    let max_lag = ((sr / params.floor).floor() as usize).min(window_len - 1);
    let window = hann(window_len);
    let window_ac = autocorrelation(&window, max_lag);

    let n_frames = ((sig.duration() - window_dur) / params.step).floor() as usize + 1;
    let mut frames = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let t = window_dur / 2.0 + i as f64 * params.step;
        let start = ((t - window_dur / 2.0) * sr).round() as usize;
        let end = (start + window_len).min(sig.samples.len());
        let chunk = &sig.samples[start..end];

        // Local mean removal keeps DC offsets from masquerading as periodicity.
        let mean = chunk.iter().sum::<f64>() / chunk.len() as f64;
        let windowed: Vec<f64> =
            chunk.iter().zip(&window).map(|(s, w)| (s - mean) * w).collect();

        let r = autocorrelation(&windowed, max_lag);
        if r[0] <= 0.0 {
            frames.push(PitchFrame { time: t, f0: None, strength: 0.0 });
            continue;
        }
        let rn: Vec<f64> = r
            .iter()
            .enumerate()
            .map(|(lag, v)| {
                if window_ac[lag] > 0.0 {
                    (v / r[0]) / (window_ac[lag] / window_ac[0])
                } else {
                    0.0
                }
            })
            .collect();

        // Candidate selection applies a small octave cost so a subharmonic
        // (peak at 2T, 3T, ... with near-identical height) never outranks
        // the true period; the reported strength stays unadjusted.
        let mut best: Option<(f64, f64, f64)> = None; // (lag, strength, adjusted)
        for lag in min_lag.max(1)..max_lag.min(rn.len() - 1) {
            if rn[lag] > rn[lag - 1] && rn[lag] >= rn[lag + 1] {
                let (delta, height) = parabolic_vertex(rn[lag - 1], rn[lag], rn[lag + 1]);
                let refined = lag as f64 + delta;
                let freq = sr / refined;
                let adjusted = height + OCTAVE_COST * (freq / params.floor).log2();
                if best.is_none_or(|(_, _, a)| adjusted > a) {
                    best = Some((refined, height, adjusted));
                }
            }
        }
        let best = best.map(|(lag, strength, _)| (lag, strength));

        let frame = match best {
            Some((lag, strength)) if strength >= params.voicing_threshold => {
                let f0 = sr / lag;
                if f0 >= params.floor && f0 <= params.ceiling {
                    PitchFrame { time: t, f0: Some(f0), strength: strength.min(1.0) }
                } else {
                    PitchFrame { time: t, f0: None, strength: strength.min(1.0) }
                }
            }
            Some((_, strength)) => PitchFrame { time: t, f0: None, strength: strength.max(0.0).min(1.0) },
            None => PitchFrame { time: t, f0: None, strength: 0.0 },
        };
        frames.push(frame);
    }
    Ok(frames)
}

#[cfg(test)]
pub(crate) fn sine(freq: f64, duration: f64, sr: u32) -> AudioSignal {
    let n = (duration * sr as f64) as usize;
    AudioSignal::new(
        (0..n).map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / sr as f64).sin()).collect(),
        sr,
    )
}

#[cfg(test)]
pub(crate) fn white_noise(duration: f64, sr: u32, seed: u64) -> AudioSignal {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = (duration * sr as f64) as usize;
    AudioSignal::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(), sr)
}
