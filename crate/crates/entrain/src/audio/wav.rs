//! WAV reading: PCM 16-bit integer or 32-bit float, any channel count.

use std::path::Path;

use super::{AudioError, AudioSignal};

/// Reads one channel of a WAV file as normalized samples in [−1, 1].
pub fn read_audio(path: &Path, channel: usize) -> Result<AudioSignal, AudioError> {
    let display = path.display().to_string();
    let reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(source) => AudioError::Read { path: display.clone(), source },
        other => AudioError::UnsupportedEncoding { path: display.clone(), detail: other.to_string() },
    })?;
    let spec = reader.spec();
    if channel >= spec.channels as usize {
        return Err(AudioError::ChannelOutOfRange {
            path: display,
            channel,
            channels: spec.channels as usize,
        });
    }

    let collect = |iter: Box<dyn Iterator<Item = Result<f64, hound::Error>>>| -> Result<Vec<f64>, AudioError> {
        iter.enumerate()
            .filter(|(i, _)| i % spec.channels as usize == channel)
            .map(|(_, s)| {
                s.map_err(|e| AudioError::UnsupportedEncoding {
                    path: display.clone(),
                    detail: e.to_string(),
                })
            })
            .collect()
    };

    let mut reader = reader;
    let samples = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => collect(Box::new(
            reader.samples::<i16>().map(|s| s.map(|v| v as f64 / 32768.0)),
        ))?,
        (hound::SampleFormat::Float, 32) => {
            collect(Box::new(reader.samples::<f32>().map(|s| s.map(|v| v as f64))))?
        }
        (format, bits) => {
            return Err(AudioError::UnsupportedEncoding {
                path: display,
                detail: format!("{format:?} {bits}-bit (supported: Int 16, Float 32)"),
            })
        }
    };
    if samples.is_empty() {
        return Err(AudioError::EmptySignal);
    }
    Ok(AudioSignal::new(samples, spec.sample_rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_i16(path: &Path, channels: u16, data: &[i16]) {
        let spec = hound::WavSpec {
            channels,
            sample_rate: 16_000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(path, spec).unwrap();
        for s in data {
            w.write_sample(*s).unwrap();
        }
        w.finalize().unwrap();
    }

    #[test]
    fn full_scale_maps_to_one() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        write_i16(&path, 1, &[i16::MAX, 0, i16::MIN]);
        let sig = read_audio(&path, 0).unwrap();
        assert!((sig.samples[0] - 1.0).abs() < 1e-3);
        assert_eq!(sig.samples[1], 0.0);
        assert!((sig.samples[2] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn selects_requested_channel() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("st.wav");
        // Interleaved L/R: left = 100s, right = 200s.
        write_i16(&path, 2, &[100, 200, 100, 200, 100, 200]);
        let right = read_audio(&path, 1).unwrap();
        assert_eq!(right.samples.len(), 3);
        assert!(right.samples.iter().all(|s| (*s - 200.0 / 32768.0).abs() < 1e-12));
    }

    #[test]
    fn out_of_range_channel_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mono.wav");
        write_i16(&path, 1, &[0, 0]);
        assert!(matches!(
            read_audio(&path, 1),
            Err(AudioError::ChannelOutOfRange { channel: 1, channels: 1, .. })
        ));
    }

    #[test]
    fn non_wav_is_unsupported_encoding() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("not.wav");
        std::fs::write(&path, b"ID3\x04not really audio at all, just bytes").unwrap();
        assert!(matches!(read_audio(&path, 0), Err(AudioError::UnsupportedEncoding { .. })));
    }

    #[test]
    fn float_wav_reads_directly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 16_000,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        for s in [0.5f32, -0.25, 1.0] {
            w.write_sample(s).unwrap();
        }
        w.finalize().unwrap();
        let sig = read_audio(&path, 0).unwrap();
        assert_eq!(sig.samples, vec![0.5, -0.25, 1.0]);
    }
}
