//! Frame-wise intensity in dB re a fixed reference.
//!
//! Intensity is 10·log10 of the windowed mean-square amplitude relative to
//! 1e-10 of full scale (roughly the auditory threshold when full scale is
//! treated as ~100 dB). Silent frames floor at the reference (0 dB). The
//! absolute level is arbitrary; per-speaker z-normalization removes it.

use super::AudioSignal;

/// Mean-square reference: 0 dB.
pub const INTENSITY_REFERENCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityParams {
    pub step: f64,
    pub window: f64,
}

impl Default for IntensityParams {
    fn default() -> Self {
        Self { step: 0.010, window: 0.032 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityFrame {
    pub time: f64,
    pub db: f64,
}

/// Frame-wise intensity. A signal shorter than one window yields a single
/// frame over everything; an empty signal yields no frames.
pub fn extract_intensity(sig: &AudioSignal, params: &IntensityParams) -> Vec<IntensityFrame> {
    assert!(params.window >= params.step, "window must cover the step");
    if sig.samples.is_empty() {
        return Vec::new();
    }
    let sr = sig.sample_rate as f64;
    let window_len = ((params.window * sr).round() as usize).max(1);

    let db_of = |chunk: &[f64]| {
        let ms = chunk.iter().map(|s| s * s).sum::<f64>() / chunk.len() as f64;
        if ms <= INTENSITY_REFERENCE {
            0.0
        } else {
            10.0 * (ms / INTENSITY_REFERENCE).log10()
        }
    };

    if sig.samples.len() < window_len {
        return vec![IntensityFrame { time: sig.duration() / 2.0, db: db_of(&sig.samples) }];
    }
    let n_frames = ((sig.duration() - params.window) / params.step).floor() as usize + 1;
    (0..n_frames)
        .map(|i| {
            let t = params.window / 2.0 + i as f64 * params.step;
            let start = ((t - params.window / 2.0) * sr).round() as usize;
            let end = (start + window_len).min(sig.samples.len());
            IntensityFrame { time: t, db: db_of(&sig.samples[start..end]) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn square_wave(amplitude: f64, n: usize, sr: u32) -> AudioSignal {
        AudioSignal::new(
            (0..n).map(|i| if (i / 40) % 2 == 0 { amplitude } else { -amplitude }).collect(),
            sr,
        )
    }

    #[test]
    fn full_scale_square_wave_is_100_db() {
        let sig = square_wave(1.0, 16_000, 16_000);
        let frames = extract_intensity(&sig, &IntensityParams::default());
        for f in &frames {
            assert_abs_diff_eq!(f.db, 100.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn halving_amplitude_drops_six_db() {
        let loud = square_wave(1.0, 16_000, 16_000);
        let soft = square_wave(0.5, 16_000, 16_000);
        let a = extract_intensity(&loud, &IntensityParams::default());
        let b = extract_intensity(&soft, &IntensityParams::default());
        for (fa, fb) in a.iter().zip(&b) {
            assert_abs_diff_eq!(fa.db - fb.db, 20.0 * 2.0f64.log10(), epsilon = 1e-9);
        }
    }

    #[test]
    fn digital_silence_floors_at_zero() {
        let sig = AudioSignal::new(vec![0.0; 8000], 16_000);
        let frames = extract_intensity(&sig, &IntensityParams::default());
        assert!(frames.iter().all(|f| f.db == 0.0));
    }

    #[test]
    fn short_signal_gets_one_frame() {
        let sig = AudioSignal::new(vec![0.5; 100], 16_000);
        let frames = extract_intensity(&sig, &IntensityParams::default());
        assert_eq!(frames.len(), 1);
        assert_abs_diff_eq!(frames[0].db, 10.0 * (0.25f64 / 1e-10).log10(), epsilon = 1e-9);
    }
}
