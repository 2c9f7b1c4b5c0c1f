//! Clip-level helpers for the acoustic path: resample, extract, train and
//! classify.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audio_io::{resample, AudioClip};
use crate::dsp::features::{extract_features, FeatureConfig, FeatureSubset, FeatureVector};
use crate::error::Result;
use crate::svm::smo::train;
use crate::svm::{classify_clip, Kernel, Label, LabeledSample, SvmModel};

/// Default SVM box constraint.
pub const DEFAULT_C: f64 = 10.0;
/// Default SMO stopping tolerance.
pub const DEFAULT_TOL: f64 = 1e-3;

/// An audio clip with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledClip {
    pub id: String,
    pub clip: AudioClip,
    pub is_tv: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub features: FeatureConfig,
    pub subset: FeatureSubset,
    /// `None` selects an RBF kernel with gamma = 1 / feature count.
    pub kernel: Option<Kernel>,
    pub c: f64,
    pub tol: f64,
    /// Clips above this rate are downsampled before extraction.
    pub sample_rate: Option<u32>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            features: FeatureConfig::default(),
            subset: FeatureSubset::all(),
            kernel: None,
            c: DEFAULT_C,
            tol: DEFAULT_TOL,
            sample_rate: None,
        }
    }
}

/// Downsamples to `rate` when given and lower than the clip's rate, then
/// extracts per-window features.
pub fn clip_windows(clip: &AudioClip, rate: Option<u32>, config: &FeatureConfig) -> Result<Vec<FeatureVector>> {
    match rate {
        Some(r) if r != clip.sample_rate => extract_features(&resample(clip, r)?, config),
        _ => extract_features(clip, config),
    }
}

/// One training sample per feature window of every clip.
pub fn training_samples(clips: &[LabeledClip], options: &TrainOptions) -> Result<Vec<LabeledSample>> {
    let per_clip: Vec<Vec<LabeledSample>> = clips
        .par_iter()
        .map(|c| {
            let windows = clip_windows(&c.clip, options.sample_rate, &options.features)?;
            Ok(windows
                .iter()
                .map(|w| LabeledSample::new(options.subset.project(w), Label::from_bool(c.is_tv)))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_clip.into_iter().flatten().collect())
}

pub fn train_model(clips: &[LabeledClip], options: &TrainOptions) -> Result<SvmModel> {
    let samples = training_samples(clips, options)?;
    let kernel = options
        .kernel
        .unwrap_or_else(|| Kernel::default_rbf(options.subset.len()));
    let mut model = train(&samples, kernel, options.c, options.tol)?;
    model.feature_columns = options.subset.indices().to_vec();
    Ok(model)
}

/// Clip verdict and fraction of windows voting TV.
pub fn classify_audio(
    model: &SvmModel,
    clip: &AudioClip,
    rate: Option<u32>,
    config: &FeatureConfig,
) -> Result<(Label, f64)> {
    classify_clip(model, &clip_windows(clip, rate, config)?)
}
