//! Energy-based SNR estimation for audio-quality validation.
//!
//! Frames above the 60th percentile of frame energy are treated as speech,
//! frames below the 20th as noise; SNR = 10·log10(P_speech / P_noise). The
//! percentile split is a stated, VAD-free heuristic: conversational audio
//! has both speech-bearing and pause frames, so the two tails separate the
//! classes well enough for a cleanliness check.

use super::{AudioError, AudioSignal};

/// Clean-speech threshold (dB): recordings above this are considered clean.
pub const CLEAN_SPEECH_SNR_DB: f64 = 30.0;

const FRAME_S: f64 = 0.020;
const HOP_S: f64 = 0.010;
const SPEECH_PERCENTILE: f64 = 60.0;
const NOISE_PERCENTILE: f64 = 20.0;
/// Floor on noise power so digital silence yields a finite (large) SNR.
const NOISE_FLOOR: f64 = 1e-15;

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((p / 100.0) * (sorted.len() as f64 - 1.0)).round() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

/// Estimates the speech-to-noise ratio in dB. Needs at least 1 s of audio.
pub fn estimate_snr(sig: &AudioSignal) -> Result<f64, AudioError> {
    if sig.duration() < 1.0 {
        return Err(AudioError::TooShortForSnr { duration: sig.duration() });
    }
    let sr = sig.sample_rate as f64;
    let frame_len = (FRAME_S * sr).round() as usize;
    let hop = (HOP_S * sr).round() as usize;
    let mut energies = Vec::new();
    let mut start = 0usize;
    while start + frame_len <= sig.samples.len() {
        let chunk = &sig.samples[start..start + frame_len];
        energies.push(chunk.iter().map(|s| s * s).sum::<f64>() / frame_len as f64);
        start += hop;
    }
    if energies.iter().all(|e| *e < 1e-12) {
        return Err(AudioError::AllSilent);
    }

    let mut sorted = energies.clone();
    sorted.sort_by(f64::total_cmp);
    let q_speech = percentile(&sorted, SPEECH_PERCENTILE);
    let q_noise = percentile(&sorted, NOISE_PERCENTILE);
    let speech: Vec<f64> = energies.iter().copied().filter(|e| *e > q_speech).collect();
    let noise: Vec<f64> = energies.iter().copied().filter(|e| *e < q_noise).collect();
    if speech.is_empty() || noise.is_empty() {
        return Err(AudioError::NoEnergySpread);
    }
    let p_speech = speech.iter().sum::<f64>() / speech.len() as f64;
    let p_noise = (noise.iter().sum::<f64>() / noise.len() as f64).max(NOISE_FLOOR);
    Ok(10.0 * (p_speech / p_noise).log10())
}

#[cfg(test)]
mod tests {
    use super::super::pitch::{sine, white_noise};
    use super::*;

    /// Tone bursts (speech-like) over a continuous noise floor at the given
    /// relative power.
    fn bursty_mixture(noise_power_ratio: f64, seed: u64) -> AudioSignal {
        let sr = 16_000u32;
        let tone = sine(220.0, 2.0, sr);
        let noise = white_noise(2.0, sr, seed);
        // Tone power 0.5; uniform noise power 1/3.
        let noise_scale = (0.5 * noise_power_ratio / (1.0 / 3.0)).sqrt();
        let samples: Vec<f64> = tone
            .samples
            .iter()
            .zip(&noise.samples)
            .enumerate()
            .map(|(i, (s, n))| {
                // 200 ms on / 200 ms off bursts.
                let on = (i / (sr as usize / 5)) % 2 == 0;
                (if on { *s } else { 0.0 }) + noise_scale * n
            })
            .collect();
        AudioSignal::new(samples, sr)
    }

    #[test]
    fn forty_db_floor_recovers_forty_db() {
        let sig = bursty_mixture(1e-4, 5);
        let snr = estimate_snr(&sig).unwrap();
        assert!((snr - 40.0).abs() < 2.0, "SNR {snr} not within 2 dB of 40");
    }

    #[test]
    fn equal_power_mixture_is_near_zero_db() {
        // Continuous tone + equal-power noise: every frame carries the same
        // power, so the speech/noise split finds no contrast.
        let sr = 16_000u32;
        let tone = sine(220.0, 2.0, sr);
        let noise = white_noise(2.0, sr, 6);
        let scale = (0.5f64 / (1.0 / 3.0)).sqrt();
        let samples: Vec<f64> =
            tone.samples.iter().zip(&noise.samples).map(|(s, n)| s + scale * n).collect();
        let snr = estimate_snr(&AudioSignal::new(samples, sr)).unwrap();
        assert!(snr.abs() < 2.0, "SNR {snr} not within 2 dB of 0");
    }

    #[test]
    fn all_silent_is_an_error() {
        let sig = AudioSignal::new(vec![0.0; 32_000], 16_000);
        assert!(matches!(estimate_snr(&sig), Err(AudioError::AllSilent)));
    }

    #[test]
    fn short_signal_is_an_error() {
        let sig = sine(200.0, 0.5, 16_000);
        assert!(matches!(estimate_snr(&sig), Err(AudioError::TooShortForSnr { .. })));
    }
}
