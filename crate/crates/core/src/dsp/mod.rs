//! Acoustic feature extraction: FFT, spectral moments, MFCCs and
//! time-domain descriptors.

pub mod features;
pub mod fft;
pub mod spectral;

pub use features::{
    extract_features, frame_samples, frame_signal, short_time_energy, write_feature_csv,
    zero_crossing_rate, FeatureConfig, FeatureExtractor, FeatureSubset, FeatureVector, FrameSpec,
    Window, FEATURE_DIM, FEATURE_NAMES, N_MFCC,
};
pub use fft::Fft;
pub use spectral::{
    dct_ii, hz_to_mel, mel_to_hz, mfcc, power_spectrum, spectral_centroid_spread, MelFilterbank,
    Spectrum, MEL_ENERGY_FLOOR,
};
