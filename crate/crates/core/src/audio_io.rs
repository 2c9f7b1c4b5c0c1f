//! Reading, writing and downsampling of PCM audio.
//!
//! Every clip is held as mono `f64` samples in `[-1, 1]` regardless of the
//! container's bit depth or channel count.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};

/// Mono PCM audio with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    /// Ground-truth class tag, when known.
    pub source_label: Option<String>,
}

impl AudioClip {
    /// Builds a clip, clamping samples into `[-1, 1]`.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        let samples = samples.into_iter().map(|s| s.clamp(-1.0, 1.0)).collect();
        Ok(Self {
            samples,
            sample_rate,
            source_label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.source_label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

fn map_hound(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e) => Error::io(path, e),
        hound::Error::Unsupported => Error::UnsupportedCodec(format!(
            "{}: only uncompressed 8/16-bit PCM is supported",
            path.display()
        )),
        other => Error::Format(format!("{}: {other}", path.display())),
    }
}

/// Reads an uncompressed 8- or 16-bit PCM WAVE file as a mono clip.
///
/// Stereo frames are averaged. Integer samples are divided by the full-scale
/// value of their type (128 or 32768).
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int {
        return Err(Error::UnsupportedCodec(format!(
            "{}: floating-point WAVE data",
            path.display()
        )));
    }
    if spec.channels == 0 || spec.channels > 2 {
        return Err(Error::UnsupportedCodec(format!(
            "{}: {} channels",
            path.display(),
            spec.channels
        )));
    }
    let full_scale = match spec.bits_per_sample {
        8 => 128.0,
        16 => 32768.0,
        bits => {
            return Err(Error::UnsupportedCodec(format!(
                "{}: {bits}-bit samples",
                path.display()
            )))
        }
    };
    let raw: Vec<f64> = if spec.bits_per_sample == 8 {
        reader
            .samples::<i8>()
            .map(|s| s.map(|v| v as f64 / full_scale))
            .collect::<std::result::Result<_, _>>()
    } else {
        reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / full_scale))
            .collect::<std::result::Result<_, _>>()
    }
    .map_err(|e| map_hound(path, e))?;

    let channels = spec.channels as usize;
    let samples: Vec<f64> = raw
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    if samples.is_empty() {
        return Err(Error::EmptyClip);
    }
    AudioClip::new(samples, spec.sample_rate)
}

/// Quantizes one sample to signed 16-bit with rounding and full-scale clamping.
pub fn quantize_i16(sample: f64) -> i16 {
    (sample * 32768.0).round().clamp(-32768.0, 32767.0) as i16
}

/// Writes a clip as 16-bit mono PCM WAVE.
pub fn write_wav(clip: &AudioClip, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| map_hound(path, e))?;
    let mut samples = writer.get_i16_writer(clip.samples.len() as u32);
    for &s in &clip.samples {
        samples.write_sample(quantize_i16(s));
    }
    samples.flush().map_err(|e| map_hound(path, e))?;
    writer.finalize().map_err(|e| map_hound(path, e))
}

/// Half-width of the resampling kernel, in output sample periods (64 taps).
const KERNEL_HALF_TAPS: f64 = 32.0;
/// Anti-alias cutoff as a fraction of the target rate.
const CUTOFF_FRACTION: f64 = 0.45;
/// Above this many distinct fractional phases the kernel is evaluated per output sample.
const MAX_PHASE_TABLE: u64 = 4096;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Hamming-windowed sinc kernel taps for one fractional input offset.
///
/// Tap `j` weights input sample `i0 - half + 1 + j` for an output positioned at
/// `i0 + frac`. Taps are normalized to unit sum.
fn kernel_taps(frac: f64, half: usize, cutoff: f64, support: f64, out: &mut Vec<f64>) {
    out.clear();
    for j in 0..2 * half {
        let d = j as f64 - half as f64 + 1.0 - frac;
        let tap = if d.abs() >= support {
            0.0
        } else {
            let w = 0.54 + 0.46 * (PI * d / support).cos();
            2.0 * cutoff * sinc(2.0 * cutoff * d) * w
        };
        out.push(tap);
    }
    let sum: f64 = out.iter().sum();
    if sum.abs() > 0.0 {
        out.iter_mut().for_each(|t| *t /= sum);
    }
}

/// Downsamples a clip to `target_rate` with a windowed-sinc anti-alias filter.
///
/// The low-pass cutoff sits at `0.45 * target_rate` and the kernel spans 64
/// periods of the target rate. Output length is the input duration rounded
/// to the nearest output sample.
pub fn resample(clip: &AudioClip, target_rate: u32) -> Result<AudioClip> {
    let source_rate = clip.sample_rate;
    if target_rate == 0 {
        return Err(Error::InvalidConfig("target rate must be positive".into()));
    }
    if target_rate > source_rate {
        return Err(Error::UnsupportedDirection {
            source_rate,
            target: target_rate,
        });
    }
    if target_rate == source_rate {
        return Ok(clip.clone());
    }

    let fs_in = source_rate as u64;
    let fs_out = target_rate as u64;
    let n_in = clip.samples.len();
    let n_out = ((n_in as u64 * fs_out + fs_in / 2) / fs_in) as usize;

    let ratio = fs_in as f64 / fs_out as f64;
    // Cutoff in cycles per input sample; support in input samples.
    let cutoff = CUTOFF_FRACTION * fs_out as f64 / fs_in as f64;
    let support = KERNEL_HALF_TAPS * ratio;
    let half = support.ceil() as usize;

    let g = gcd(fs_in, fs_out);
    let (step, phases) = (fs_in / g, fs_out / g);
    let table: Option<Vec<Vec<f64>>> = (phases <= MAX_PHASE_TABLE).then(|| {
        (0..phases)
            .map(|p| {
                let mut taps = Vec::new();
                kernel_taps(p as f64 / phases as f64, half, cutoff, support, &mut taps);
                taps
            })
            .collect()
    });

    let mut scratch = Vec::new();
    let mut out = Vec::with_capacity(n_out);
    for k in 0..n_out as u64 {
        let i0 = (k * step / phases) as i64;
        let phase = (k * step % phases) as usize;
        let taps: &[f64] = match &table {
            Some(t) => &t[phase],
            None => {
                kernel_taps(phase as f64 / phases as f64, half, cutoff, support, &mut scratch);
                &scratch
            }
        };
        let first = i0 - half as i64 + 1;
        let mut acc = 0.0;
        for (j, &tap) in taps.iter().enumerate() {
            let n = first + j as i64;
            if n >= 0 && (n as usize) < n_in {
                acc += tap * clip.samples[n as usize];
            }
        }
        out.push(acc);
    }

    let mut resampled = AudioClip::new(out, target_rate)?;
    resampled.source_label = clip.source_label.clone();
    Ok(resampled)
}

/// Zero-phase FIR low-pass (Hamming-windowed sinc, `taps` odd).
///
/// Samples beyond either end of the signal are treated as zero.
pub fn lowpass(samples: &[f64], sample_rate: u32, cutoff_hz: f64, taps: usize) -> Vec<f64> {
    let taps = taps | 1;
    let half = (taps / 2) as isize;
    let fc = cutoff_hz / sample_rate as f64;
    let mut kernel: Vec<f64> = (-half..=half)
        .map(|k| {
            let w = 0.54 + 0.46 * (PI * k as f64 / (half + 1) as f64).cos();
            2.0 * fc * sinc(2.0 * fc * k as f64) * w
        })
        .collect();
    let sum: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= sum);

    let n = samples.len() as isize;
    (0..n)
        .map(|i| {
            let lo = (i - half).max(0);
            let hi = (i + half).min(n - 1);
            (lo..=hi)
                .map(|j| samples[j as usize] * kernel[(j - i + half) as usize])
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, rate: u32, seconds: f64, amp: f64) -> AudioClip {
        let n = (rate as f64 * seconds) as usize;
        let samples = (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / rate as f64).sin())
            .collect();
        AudioClip::new(samples, rate).unwrap()
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    fn write_raw_wav(path: &Path, channels: u16, bits: u16, rate: u32, data: &[u8], format_tag: u16) {
        let block_align = channels * bits / 8;
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&(36 + 12 + data.len() as u32).to_le_bytes());
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&16u32.to_le_bytes());
        bytes.extend_from_slice(&format_tag.to_le_bytes());
        bytes.extend_from_slice(&channels.to_le_bytes());
        bytes.extend_from_slice(&rate.to_le_bytes());
        bytes.extend_from_slice(&(rate * block_align as u32).to_le_bytes());
        bytes.extend_from_slice(&block_align.to_le_bytes());
        bytes.extend_from_slice(&bits.to_le_bytes());
        // An unknown chunk that readers must skip.
        bytes.extend_from_slice(b"junk");
        bytes.extend_from_slice(&4u32.to_le_bytes());
        bytes.extend_from_slice(&[1, 2, 3, 4]);
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&(data.len() as u32).to_le_bytes());
        bytes.extend_from_slice(data);
        std::fs::write(path, bytes).unwrap();
    }

    #[test]
    fn reads_16bit_mono_full_scale() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let data: Vec<u8> = [0i16, 16384, -32768].iter().flat_map(|v| v.to_le_bytes()).collect();
        write_raw_wav(&path, 1, 16, 8000, &data, 1);
        let clip = read_wav(&path).unwrap();
        assert_eq!(clip.sample_rate, 8000);
        assert_eq!(clip.samples, vec![0.0, 0.5, -1.0]);
    }

    #[test]
    fn averages_stereo_frames() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.wav");
        // Left at +0.5, right at 0.
        let data: Vec<u8> = [16384i16, 0].iter().flat_map(|v| v.to_le_bytes()).collect();
        write_raw_wav(&path, 2, 16, 8000, &data, 1);
        let clip = read_wav(&path).unwrap();
        assert_eq!(clip.samples, vec![0.25]);

        let path8 = dir.path().join("s8.wav");
        // 8-bit unsigned: 255 is +127/128, 128 is zero.
        write_raw_wav(&path8, 2, 8, 8000, &[255, 128], 1);
        let clip = read_wav(&path8).unwrap();
        assert!((clip.samples[0] - 127.0 / 256.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_empty_and_compressed() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("e.wav");
        write_raw_wav(&empty, 1, 16, 8000, &[], 1);
        assert!(matches!(read_wav(&empty), Err(Error::EmptyClip)));

        let alaw = dir.path().join("alaw.wav");
        write_raw_wav(&alaw, 1, 8, 8000, &[1, 2, 3], 6);
        assert!(matches!(read_wav(&alaw), Err(Error::UnsupportedCodec(_))));

        let junk = dir.path().join("junk.wav");
        std::fs::write(&junk, b"RIFX not a wave").unwrap();
        assert!(matches!(read_wav(&junk), Err(Error::Format(_))));
    }

    #[test]
    fn write_quantizes_and_clamps() {
        assert_eq!(quantize_i16(0.0), 0);
        assert_eq!(quantize_i16(1.0), 32767);
        assert_eq!(quantize_i16(-1.0), -32768);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.wav");
        write_wav(&AudioClip::new(vec![0.0, 1.0], 16000).unwrap(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[bytes.len() - 4..], &[0, 0, 0xff, 0x7f]);
    }

    #[test]
    fn resample_identity_and_direction() {
        let clip = sine(440.0, 8000, 0.1, 0.5);
        assert_eq!(resample(&clip, 8000).unwrap(), clip);
        assert!(matches!(
            resample(&clip, 16000),
            Err(Error::UnsupportedDirection { .. })
        ));
    }

    #[test]
    fn resample_keeps_duration() {
        for &(from, to, n) in &[(44100u32, 4000u32, 44101usize), (44100, 16000, 999), (48000, 44100, 12345)] {
            let clip = AudioClip::new(vec![0.1; n], from).unwrap();
            let out = resample(&clip, to).unwrap();
            let diff = (out.duration_seconds() - clip.duration_seconds()).abs();
            assert!(diff <= 1.0 / to as f64, "{from}->{to}: {diff}");
        }
    }

    #[test]
    fn resample_rejects_tone_above_new_nyquist() {
        let clip = sine(10_000.0, 44100, 1.0, 0.8);
        let out = resample(&clip, 8000).unwrap();
        // Skip the edges where the kernel runs off the clip.
        let inner = &out.samples[200..out.len() - 200];
        assert!(rms(inner) < 0.05 * rms(&clip.samples));
    }

    #[test]
    fn lowpass_passes_low_and_stops_high() {
        let low = sine(1000.0, 44100, 0.5, 0.5);
        let high = sine(12_000.0, 44100, 0.5, 0.5);
        let out_low = lowpass(&low.samples, 44100, 8000.0, 101);
        let out_high = lowpass(&high.samples, 44100, 8000.0, 101);
        assert!((rms(&out_low[200..out_low.len() - 200]) / rms(&low.samples) - 1.0).abs() < 0.01);
        assert!(rms(&out_high[200..out_high.len() - 200]) < 0.01 * rms(&high.samples));
    }

    #[test]
    fn resample_preserves_passband_tones() {
        for &(from, to, f) in &[(44100u32, 4000u32, 1590.0), (44100, 8000, 3000.0), (44100, 16000, 400.0)] {
            let clip = sine(f, from, 1.0, 0.5);
            let out = resample(&clip, to).unwrap();
            let inner = &out.samples[200..out.len() - 200];
            let ratio = rms(inner) / (0.5 / 2f64.sqrt());
            assert!((ratio - 1.0).abs() < 0.05, "{f} Hz at {to}: gain {ratio}");
        }
    }
}
