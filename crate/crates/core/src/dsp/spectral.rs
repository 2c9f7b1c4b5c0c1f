//! Magnitude spectra, spectral moments and mel-frequency cepstral coefficients.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::fft::Fft;
use crate::error::{Error, Result};

/// Floor applied to mel filter energies before taking the logarithm.
pub const MEL_ENERGY_FLOOR: f64 = 1e-10;

/// One-sided magnitude spectrum, bins `0..=fft_size/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub magnitudes: Vec<f64>,
    /// Hz per bin.
    pub bin_width: f64,
}

impl Spectrum {
    pub fn fft_size(&self) -> usize {
        (self.magnitudes.len() - 1) * 2
    }

    pub fn bin_frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_width
    }

    pub fn is_silent(&self) -> bool {
        self.magnitudes.iter().all(|&m| m == 0.0)
    }
}

/// Magnitude of the DFT of `frame` zero-padded to `fft_size`.
pub fn power_spectrum(frame: &[f64], fft_size: usize, sample_rate: u32) -> Result<Spectrum> {
    let fft = Fft::new(fft_size)?;
    if frame.len() > fft_size {
        return Err(Error::InvalidSize(format!(
            "frame of {} samples exceeds FFT size {fft_size}",
            frame.len()
        )));
    }
    let mut buf = Vec::with_capacity(fft_size);
    Ok(spectrum_with(&fft, frame, sample_rate, &mut buf))
}

pub(crate) fn spectrum_with(
    fft: &Fft,
    frame: &[f64],
    sample_rate: u32,
    buf: &mut Vec<Complex64>,
) -> Spectrum {
    fft.forward_real(frame, buf);
    let n = fft.size();
    Spectrum {
        magnitudes: buf[..=n / 2].iter().map(|c| c.norm()).collect(),
        bin_width: sample_rate as f64 / n as f64,
    }
}

/// Magnitude-weighted mean frequency and the standard deviation around it.
pub fn spectral_centroid_spread(spec: &Spectrum) -> Result<(f64, f64)> {
    let total: f64 = spec.magnitudes.iter().sum();
    if total <= 0.0 {
        return Err(Error::UndefinedCentroid);
    }
    let centroid = spec
        .magnitudes
        .iter()
        .enumerate()
        .map(|(i, &m)| spec.bin_frequency(i) * m)
        .sum::<f64>()
        / total;
    let variance = spec
        .magnitudes
        .iter()
        .enumerate()
        .map(|(i, &m)| (spec.bin_frequency(i) - centroid).powi(2) * m)
        .sum::<f64>()
        / total;
    Ok((centroid, variance.sqrt()))
}

/// Hz to mel.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

/// Mel to Hz.
pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters equally spaced on the mel scale between 0 Hz and Nyquist.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    /// `weights[m][bin]`
    weights: Vec<Vec<f64>>,
}

impl MelFilterbank {
    pub fn new(n_filters: usize, n_bins: usize, bin_width: f64) -> Result<Self> {
        if n_filters == 0 {
            return Err(Error::InvalidConfig("mel filterbank needs at least one filter".into()));
        }
        if n_filters > n_bins {
            return Err(Error::InvalidConfig(format!(
                "{n_filters} mel filters exceed {n_bins} spectrum bins"
            )));
        }
        let nyquist = (n_bins - 1) as f64 * bin_width;
        let top = hz_to_mel(nyquist);
        let edges: Vec<f64> = (0..n_filters + 2)
            .map(|i| mel_to_hz(top * i as f64 / (n_filters + 1) as f64))
            .collect();
        let weights = (0..n_filters)
            .map(|m| {
                let (lo, center, hi) = (edges[m], edges[m + 1], edges[m + 2]);
                (0..n_bins)
                    .map(|b| {
                        let f = b as f64 * bin_width;
                        if f > lo && f <= center {
                            (f - lo) / (center - lo)
                        } else if f > center && f < hi {
                            (hi - f) / (hi - center)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { weights })
    }

    pub fn n_filters(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Filter energies over the power spectrum (squared magnitudes).
    pub fn energies(&self, spec: &Spectrum) -> Vec<f64> {
        self.weights
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&spec.magnitudes)
                    .map(|(w, m)| w * m * m)
                    .sum()
            })
            .collect()
    }

    /// Floored log filter energies followed by an unnormalized DCT-II.
    pub fn cepstrum(&self, spec: &Spectrum, n_coeffs: usize) -> Vec<f64> {
        let logs: Vec<f64> = self
            .energies(spec)
            .into_iter()
            .map(|e| e.max(MEL_ENERGY_FLOOR).ln())
            .collect();
        dct_ii(&logs, n_coeffs)
    }
}

/// `c[k] = sum_m x[m] cos(pi k (m + 1/2) / M)` for `k < n_out`.
pub fn dct_ii(x: &[f64], n_out: usize) -> Vec<f64> {
    let m = x.len() as f64;
    (0..n_out)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(i, &v)| v * (PI * k as f64 * (i as f64 + 0.5) / m).cos())
                .sum()
        })
        .collect()
}

/// MFCCs of one spectrum.
pub fn mfcc(spec: &Spectrum, n_filters: usize, n_coeffs: usize) -> Result<Vec<f64>> {
    if n_coeffs > n_filters {
        return Err(Error::InvalidConfig(format!(
            "{n_coeffs} coefficients requested from {n_filters} filters"
        )));
    }
    let bank = MelFilterbank::new(n_filters, spec.magnitudes.len(), spec.bin_width)?;
    Ok(bank.cepstrum(spec, n_coeffs))
}
