//! Framing, time-domain features and per-window feature aggregation.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::Fft;
use super::spectral::{spectral_centroid_spread, spectrum_with, MelFilterbank};
use crate::audio_io::AudioClip;
use crate::error::{Error, Result};

/// Number of cepstral coefficients in a [`FeatureVector`].
pub const N_MFCC: usize = 13;
/// Length of a flattened [`FeatureVector`].
pub const FEATURE_DIM: usize = 4 + N_MFCC;

/// Column names of a flattened [`FeatureVector`], in order.
pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "zcr",
    "ste",
    "spectral_centroid",
    "spectrum_spread",
    "mfcc0",
    "mfcc1",
    "mfcc2",
    "mfcc3",
    "mfcc4",
    "mfcc5",
    "mfcc6",
    "mfcc7",
    "mfcc8",
    "mfcc9",
    "mfcc10",
    "mfcc11",
    "mfcc12",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    Hamming,
}

impl Window {
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; len],
            Window::Hamming if len == 1 => vec![1.0],
            Window::Hamming => (0..len)
                .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (len - 1) as f64).cos())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSpec {
    pub frame_length: usize,
    pub hop_length: usize,
    pub window: Window,
}

impl FrameSpec {
    pub fn new(frame_length: usize, hop_length: usize, window: Window) -> Result<Self> {
        if hop_length == 0 || hop_length > frame_length {
            return Err(Error::InvalidConfig(format!(
                "hop {hop_length} must be in 1..={frame_length}"
            )));
        }
        Ok(Self {
            frame_length,
            hop_length,
            window,
        })
    }

    /// Frame count for a signal of `n` samples.
    pub fn frame_count(&self, n: usize) -> usize {
        if n < self.frame_length {
            0
        } else {
            (n - self.frame_length) / self.hop_length + 1
        }
    }
}

/// Splits `samples` into overlapping frames, each multiplied by the window.
pub fn frame_samples(samples: &[f64], spec: &FrameSpec) -> Result<Vec<Vec<f64>>> {
    if samples.len() < spec.frame_length {
        return Err(Error::InsufficientData(format!(
            "{} samples is shorter than one {}-sample frame",
            samples.len(),
            spec.frame_length
        )));
    }
    let window = spec.window.coefficients(spec.frame_length);
    Ok((0..spec.frame_count(samples.len()))
        .map(|f| {
            let start = f * spec.hop_length;
            samples[start..start + spec.frame_length]
                .iter()
                .zip(&window)
                .map(|(s, w)| s * w)
                .collect()
        })
        .collect())
}

pub fn frame_signal(clip: &AudioClip, spec: &FrameSpec) -> Result<Vec<Vec<f64>>> {
    frame_samples(&clip.samples, spec)
}

/// Fraction of adjacent sample pairs whose signs differ.
///
/// A zero sample inherits the sign of the last non-zero sample before it.
pub fn zero_crossing_rate(frame: &[f64]) -> Result<f64> {
    if frame.len() < 2 {
        return Err(Error::InsufficientData(
            "zero-crossing rate needs at least two samples".into(),
        ));
    }
    let mut crossings = 0usize;
    let mut prev_sign = 0i8;
    for &s in frame {
        let sign = if s > 0.0 {
            1
        } else if s < 0.0 {
            -1
        } else {
            prev_sign
        };
        if sign != 0 && prev_sign != 0 && sign != prev_sign {
            crossings += 1;
        }
        if sign != 0 {
            prev_sign = sign;
        }
    }
    Ok(crossings as f64 / (frame.len() - 1) as f64)
}

/// Mean squared amplitude.
pub fn short_time_energy(frame: &[f64]) -> Result<f64> {
    if frame.is_empty() {
        return Err(Error::InsufficientData("empty frame".into()));
    }
    Ok(frame.iter().map(|s| s * s).sum::<f64>() / frame.len() as f64)
}

/// Acoustic descriptor of one analysis window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub zcr: f64,
    pub ste: f64,
    pub spectral_centroid: f64,
    pub spectrum_spread: f64,
    pub mfcc: [f64; N_MFCC],
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_DIM] {
        let mut out = [0.0; FEATURE_DIM];
        out[0] = self.zcr;
        out[1] = self.ste;
        out[2] = self.spectral_centroid;
        out[3] = self.spectrum_spread;
        out[4..].copy_from_slice(&self.mfcc);
        out
    }
}

/// A selection of columns out of the flattened feature vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSubset(Vec<usize>);

impl FeatureSubset {
    pub fn all() -> Self {
        Self((0..FEATURE_DIM).collect())
    }

    pub fn from_indices(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() || indices.iter().any(|&i| i >= FEATURE_DIM) {
            return Err(Error::InvalidConfig(format!(
                "feature indices {indices:?} out of range"
            )));
        }
        Ok(Self(indices))
    }

    /// Parses a comma-separated list of column names.
    ///
    /// `all` selects every column and `mfcc` expands to all thirteen
    /// cepstral coefficients.
    pub fn parse(list: &str) -> Result<Self> {
        let mut indices = Vec::new();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "all" => indices.extend(0..FEATURE_DIM),
                "mfcc" => indices.extend(4..FEATURE_DIM),
                _ => match FEATURE_NAMES.iter().position(|n| *n == name) {
                    Some(i) => indices.push(i),
                    None => {
                        return Err(Error::InvalidConfig(format!("unknown feature `{name}`")))
                    }
                },
            }
        }
        let mut seen = [false; FEATURE_DIM];
        indices.retain(|&i| !std::mem::replace(&mut seen[i], true));
        Self::from_indices(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn project(&self, features: &FeatureVector) -> Vec<f64> {
        let full = features.to_array();
        self.0.iter().map(|&i| full[i]).collect()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.0.iter().map(|&i| FEATURE_NAMES[i]).collect()
    }
}

impl Default for FeatureSubset {
    fn default() -> Self {
        Self::all()
    }
}

impl std::fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.names().join(","))
    }
}

/// Framing and aggregation parameters for feature extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub frame_seconds: f64,
    pub hop_seconds: f64,
    pub window: Window,
    /// Length of the aggregation window; one [`FeatureVector`] per window.
    pub window_seconds: f64,
    pub n_filters: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            frame_seconds: 0.025,
            hop_seconds: 0.010,
            window: Window::Hamming,
            window_seconds: 1.0,
            n_filters: 26,
        }
    }
}

impl FeatureConfig {
    pub fn frame_spec(&self, sample_rate: u32) -> Result<FrameSpec> {
        let frame = (self.frame_seconds * sample_rate as f64).round() as usize;
        let hop = ((self.hop_seconds * sample_rate as f64).round() as usize).max(1);
        if frame < 2 {
            return Err(Error::InvalidConfig(format!(
                "{} s frames are too short at {sample_rate} Hz",
                self.frame_seconds
            )));
        }
        FrameSpec::new(frame, hop, self.window)
    }

    pub fn window_samples(&self, sample_rate: u32) -> Result<usize> {
        let n = (self.window_seconds * sample_rate as f64).round() as usize;
        if n == 0 {
            return Err(Error::InvalidConfig("aggregation window is empty".into()));
        }
        Ok(n)
    }
}

/// Reusable per-rate state for feature extraction.
pub struct FeatureExtractor {
    sample_rate: u32,
    frame: FrameSpec,
    window_len: usize,
    coefficients: Vec<f64>,
    fft: Fft,
    bank: MelFilterbank,
}

impl FeatureExtractor {
    pub fn new(config: &FeatureConfig, sample_rate: u32) -> Result<Self> {
        let frame = config.frame_spec(sample_rate)?;
        let window_len = config.window_samples(sample_rate)?;
        if frame.frame_length > window_len {
            return Err(Error::InvalidConfig(format!(
                "frame of {} samples exceeds the {window_len}-sample window",
                frame.frame_length
            )));
        }
        let fft = Fft::new(frame.frame_length.next_power_of_two())?;
        let n_bins = fft.size() / 2 + 1;
        let bank = MelFilterbank::new(
            config.n_filters,
            n_bins,
            sample_rate as f64 / fft.size() as f64,
        )?;
        if bank.n_filters() < N_MFCC {
            return Err(Error::InvalidConfig(format!(
                "{} filters cannot yield {N_MFCC} coefficients",
                bank.n_filters()
            )));
        }
        Ok(Self {
            sample_rate,
            coefficients: frame.window.coefficients(frame.frame_length),
            frame,
            window_len,
            fft,
            bank,
        })
    }

    pub fn frame_spec(&self) -> &FrameSpec {
        &self.frame
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    /// One feature vector per complete aggregation window of `clip`.
    pub fn extract(&self, clip: &AudioClip) -> Result<Vec<FeatureVector>> {
        if clip.sample_rate != self.sample_rate {
            return Err(Error::Shape(format!(
                "extractor built for {} Hz given a {} Hz clip",
                self.sample_rate, clip.sample_rate
            )));
        }
        let n_windows = clip.len() / self.window_len;
        if n_windows == 0 {
            return Err(Error::InsufficientData(format!(
                "clip of {} samples is shorter than one {}-sample window",
                clip.len(),
                self.window_len
            )));
        }
        let mut buf = Vec::with_capacity(self.fft.size());
        let mut windowed = vec![0.0; self.frame.frame_length];
        Ok(clip
            .samples
            .chunks_exact(self.window_len)
            .map(|w| self.window_features(w, &mut buf, &mut windowed))
            .collect())
    }

    fn window_features(
        &self,
        samples: &[f64],
        buf: &mut Vec<Complex64>,
        windowed: &mut [f64],
    ) -> FeatureVector {
        let spec = FrameSpec {
            window: Window::Rectangular,
            ..self.frame
        };
        let n_frames = spec.frame_count(samples.len());
        let (mut zcr, mut ste) = (0.0, 0.0);
        let (mut sc, mut bw, mut voiced) = (0.0, 0.0, 0usize);
        let mut mfcc = [0.0; N_MFCC];
        for f in 0..n_frames {
            let start = f * spec.hop_length;
            let frame = &samples[start..start + spec.frame_length];
            // Frames are at least two samples long and non-empty by construction.
            zcr += zero_crossing_rate(frame).unwrap_or(0.0);
            ste += short_time_energy(frame).unwrap_or(0.0);
            for ((dst, s), w) in windowed.iter_mut().zip(frame).zip(&self.coefficients) {
                *dst = s * w;
            }
            let spectrum = spectrum_with(&self.fft, windowed, self.sample_rate, buf);
            if let Ok((c, s)) = spectral_centroid_spread(&spectrum) {
                sc += c;
                bw += s;
                voiced += 1;
            }
            for (acc, c) in mfcc.iter_mut().zip(self.bank.cepstrum(&spectrum, N_MFCC)) {
                *acc += c;
            }
        }
        let n = n_frames as f64;
        mfcc.iter_mut().for_each(|c| *c /= n);
        let (spectral_centroid, spectrum_spread) = if voiced == 0 {
            (0.0, 0.0)
        } else {
            (sc / voiced as f64, bw / voiced as f64)
        };
        FeatureVector {
            zcr: zcr / n,
            ste: ste / n,
            spectral_centroid,
            spectrum_spread,
            mfcc,
        }
    }
}

/// Features of `clip`, one vector per aggregation window.
///
/// Per-frame ZCR, STE and MFCCs are averaged over every frame of the window.
/// Centroid and spread are averaged over non-silent frames only; a window
/// with no signal at all reports `(0, 0)`.
pub fn extract_features(clip: &AudioClip, config: &FeatureConfig) -> Result<Vec<FeatureVector>> {
    FeatureExtractor::new(config, clip.sample_rate)?.extract(clip)
}

/// Writes one comma-separated row per window under a header naming every column.
pub fn write_feature_csv<W: Write>(mut out: W, windows: &[FeatureVector]) -> std::io::Result<()> {
    writeln!(out, "{}", FEATURE_NAMES.join(","))?;
    for w in windows {
        let row: Vec<String> = w.to_array().iter().map(|v| format!("{v:.9e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
