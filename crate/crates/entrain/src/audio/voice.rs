//! Jitter, shimmer, and harmonics-to-noise ratio.
//!
//! Glottal pulses are located by peak-picking inside each voiced region,
//! stepping one pitch period at a time with parabolic refinement of both
//! peak position and height. From consecutive pulses:
//!
//! - jitter  = mean |T_i − T_{i−1}| / mean T   (local jitter, period ratios)
//! - shimmer = mean |A_i − A_{i−1}| / mean A   (per-period peak amplitudes)
//!
//! HNR averages the normalized autocorrelation at the pitch lag over voiced
//! frames and converts it: 10·log10(r̄ / (1 − r̄)). A pure tone drives r̄
//! toward 1 (high HNR); equal-power noise toward 0.5 (0 dB).

use super::pitch::{PitchFrame, PitchParams};
use super::AudioSignal;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VoiceReport {
    pub jitter: Option<f64>,
    pub shimmer: Option<f64>,
    pub hnr_db: Option<f64>,
}

/// Minimum consecutive periods required before jitter/shimmer are reported.
const MIN_PERIODS: usize = 3;

fn parabolic_peak(x: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= x.len() {
        return (i as f64, x[i]);
    }
    let denom = x[i - 1] - 2.0 * x[i] + x[i + 1];
    if denom.abs() < 1e-30 {
        return (i as f64, x[i]);
    }
    let delta = 0.5 * (x[i - 1] - x[i + 1]) / denom;
    if delta.abs() >= 1.0 {
        return (i as f64, x[i]);
    }
    (i as f64 + delta, x[i] - 0.25 * (x[i - 1] - x[i + 1]) * delta)
}

/// Pulse times and peak heights within one voiced region.
fn pulses_in_region(
    sig: &AudioSignal,
    frames: &[PitchFrame],
    region: &[usize],
) -> Vec<(f64, f64)> {
    let sr = sig.sample_rate as f64;
    let f0_at = |t: f64| -> f64 {
        // Nearest voiced frame's F0.
        let mut best = (f64::MAX, 0.0);
        for &i in region {
            let d = (frames[i].time - t).abs();
            if d < best.0 {
                best = (d, frames[i].f0.unwrap_or(best.1));
            }
        }
        best.1
    };

    let t_start = frames[region[0]].time;
    let t_end = frames[*region.last().unwrap()].time;
    let mut pulses: Vec<(f64, f64)> = Vec::new();
    let mut t = t_start;
    loop {
        let period = 1.0 / f0_at(t);
        // Search window: one period ahead of the previous pulse (or of the
        // region start for the first one).
        let (lo, hi) = match pulses.last() {
            Some(&(tp, _)) => (tp + 0.8 * period, tp + 1.25 * period),
            None => (t, t + period),
        };
        if hi >= t_end || hi >= sig.duration() {
            break;
        }
        let a = (lo * sr).floor().max(0.0) as usize;
        let b = ((hi * sr).ceil() as usize).min(sig.samples.len());
        if b <= a + 2 {
            break;
        }
        let chunk = &sig.samples[a..b];
        let mut arg = 0usize;
        for (i, v) in chunk.iter().enumerate() {
            if *v > chunk[arg] {
                arg = i;
            }
        }
        let (offset, height) = parabolic_peak(chunk, arg);
        let t_peak = (a as f64 + offset) / sr;
        pulses.push((t_peak, height));
        t = t_peak;
    }
    pulses
}

/// Jitter, shimmer, and HNR from the signal plus its pitch track.
/// Insufficient voiced material leaves fields missing.
pub fn jitter_shimmer_hnr(
    sig: &AudioSignal,
    frames: &[PitchFrame],
    params: &PitchParams,
) -> VoiceReport {
    // Voiced regions as runs of voiced frame indices.
    let mut regions: Vec<Vec<usize>> = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        if f.voiced() {
            match regions.last_mut() {
                Some(r) if *r.last().unwrap() == i - 1 => r.push(i),
                _ => regions.push(vec![i]),
            }
        }
    }

    let min_period = 1.0 / params.ceiling * 0.8;
    let max_period = 1.0 / params.floor * 1.25;
    let mut period_pairs: Vec<(f64, f64)> = Vec::new();
    let mut amp_pairs: Vec<(f64, f64)> = Vec::new();
    let mut periods: Vec<f64> = Vec::new();
    let mut amps: Vec<f64> = Vec::new();
    for region in &regions {
        let pulses = pulses_in_region(sig, frames, region);
        let ts: Vec<f64> = pulses.iter().map(|(t, _)| *t).collect();
        let hs: Vec<f64> = pulses.iter().map(|(_, h)| *h).collect();
        let ps: Vec<f64> = ts.windows(2).map(|w| w[1] - w[0]).collect();
        let valid: Vec<bool> = ps.iter().map(|p| (min_period..=max_period).contains(p)).collect();
        for i in 0..ps.len() {
            if valid[i] {
                periods.push(ps[i]);
                if i > 0 && valid[i - 1] {
                    period_pairs.push((ps[i - 1], ps[i]));
                }
            }
        }
        for i in 1..hs.len() {
            let ok = |j: usize| hs[j] > 0.0;
            if ok(i) && ok(i - 1) && valid.get(i - 1).copied().unwrap_or(false) {
                amps.push(hs[i]);
                if i >= 2 && ok(i - 2) && valid.get(i - 2).copied().unwrap_or(false) {
                    amp_pairs.push((hs[i - 1], hs[i]));
                }
            }
        }
    }

    let jitter = (periods.len() >= MIN_PERIODS && !period_pairs.is_empty()).then(|| {
        let mean_abs_diff = period_pairs.iter().map(|(a, b)| (b - a).abs()).sum::<f64>()
            / period_pairs.len() as f64;
        let mean_period = periods.iter().sum::<f64>() / periods.len() as f64;
        mean_abs_diff / mean_period
    });
    let shimmer = (amps.len() >= MIN_PERIODS && !amp_pairs.is_empty()).then(|| {
        let mean_abs_diff =
            amp_pairs.iter().map(|(a, b)| (b - a).abs()).sum::<f64>() / amp_pairs.len() as f64;
        let mean_amp = amps.iter().sum::<f64>() / amps.len() as f64;
        mean_abs_diff / mean_amp
    });

    let strengths: Vec<f64> = frames.iter().filter(|f| f.voiced()).map(|f| f.strength).collect();
    let hnr_db = (!strengths.is_empty()).then(|| {
        let r = (strengths.iter().sum::<f64>() / strengths.len() as f64).clamp(1e-9, 1.0 - 1e-9);
        10.0 * (r / (1.0 - r)).log10()
    });

    VoiceReport { jitter, shimmer, hnr_db }
}

#[cfg(test)]
mod tests {
    use super::super::pitch::{extract_pitch, sine, white_noise};
    use super::*;

    fn vowel(f0: f64, duration: f64, sr: u32) -> AudioSignal {
        // A few harmonics with fixed phases: perfectly periodic.
        let n = (duration * sr as f64) as usize;
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 / sr as f64;
                let w = 2.0 * std::f64::consts::PI * f0 * t;
                0.6 * w.sin() + 0.25 * (2.0 * w).sin() + 0.1 * (3.0 * w + 0.5).sin()
            })
            .collect();
        AudioSignal::new(samples, sr)
    }

    #[test]
    fn periodic_vowel_has_negligible_jitter_and_shimmer() {
        let sig = vowel(150.0, 1.0, 16_000);
        let params = PitchParams::default();
        let frames = extract_pitch(&sig, &params).unwrap();
        let report = jitter_shimmer_hnr(&sig, &frames, &params);
        assert!(report.jitter.unwrap() < 0.001, "jitter {:?}", report.jitter);
        assert!(report.shimmer.unwrap() < 0.001, "shimmer {:?}", report.shimmer);
    }

    #[test]
    fn pure_tone_has_high_hnr() {
        let sig = sine(200.0, 1.0, 16_000);
        let params = PitchParams::default();
        let frames = extract_pitch(&sig, &params).unwrap();
        let report = jitter_shimmer_hnr(&sig, &frames, &params);
        assert!(report.hnr_db.unwrap() > 30.0, "HNR {:?}", report.hnr_db);
    }

    #[test]
    fn equal_power_noise_drives_hnr_to_zero() {
        let sr = 16_000;
        let tone = sine(200.0, 1.0, sr);
        let noise = white_noise(1.0, sr, 17);
        // Tone power = 0.5; uniform noise on [-1,1] has power 1/3. Scale the
        // noise so powers match.
        let scale = (0.5f64 / (1.0 / 3.0)).sqrt();
        let samples: Vec<f64> = tone
            .samples
            .iter()
            .zip(&noise.samples)
            .map(|(s, n)| s + scale * n)
            .collect();
        let sig = AudioSignal::new(samples, sr);
        let params = PitchParams::default();
        let frames = extract_pitch(&sig, &params).unwrap();
        let report = jitter_shimmer_hnr(&sig, &frames, &params);
        let hnr = report.hnr_db.expect("tone should stay voiced at 0 dB SNR");
        assert!(hnr.abs() < 2.0, "HNR {hnr} not within 2 dB of 0");
    }

    #[test]
    fn unvoiced_signal_yields_missing_fields() {
        let sig = white_noise(0.5, 16_000, 23);
        let params = PitchParams::default();
        let frames = extract_pitch(&sig, &params).unwrap();
        // Mark everything unvoiced to force the insufficient-material path.
        let frames: Vec<PitchFrame> =
            frames.into_iter().map(|f| PitchFrame { f0: None, ..f }).collect();
        let report = jitter_shimmer_hnr(&sig, &frames, &params);
        assert_eq!(report.jitter, None);
        assert_eq!(report.shimmer, None);
        assert_eq!(report.hnr_db, None);
    }

    #[test]
    fn scaling_amplitude_leaves_all_three_unchanged() {
        let sig = vowel(180.0, 0.8, 16_000);
        let scaled = AudioSignal::new(sig.samples.iter().map(|s| s * 3.0).collect(), 16_000);
        let params = PitchParams::default();
        let fa = extract_pitch(&sig, &params).unwrap();
        let fb = extract_pitch(&scaled, &params).unwrap();
        let a = jitter_shimmer_hnr(&sig, &fa, &params);
        let b = jitter_shimmer_hnr(&scaled, &fb, &params);
        assert!((a.jitter.unwrap() - b.jitter.unwrap()).abs() < 1e-9);
        assert!((a.shimmer.unwrap() - b.shimmer.unwrap()).abs() < 1e-9);
        assert!((a.hnr_db.unwrap() - b.hnr_db.unwrap()).abs() < 1e-6);
    }
}
