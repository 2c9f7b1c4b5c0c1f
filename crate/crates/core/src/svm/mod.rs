//! Binary kernel SVM separating TV audio from everything else.
//!
//! Training standardizes every input dimension, then solves the dual with
//! sequential minimal optimization (see [`smo`]). A clip is labelled by
//! majority vote over its per-window decisions.

mod io;
pub mod smo;

use serde::{Deserialize, Serialize};

use crate::dsp::{FeatureSubset, FeatureVector};
use crate::error::{Error, Result};

pub use io::{load_model, read_model, save_model, write_model, MODEL_MAGIC, MODEL_VERSION};
pub use smo::{train, train_detailed, TrainParams, TrainReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Tv,
    NonTv,
}

impl Label {
    /// `+1` for TV, `-1` otherwise.
    pub fn sign(self) -> f64 {
        match self {
            Label::Tv => 1.0,
            Label::NonTv => -1.0,
        }
    }

    pub fn from_bool(is_tv: bool) -> Self {
        if is_tv {
            Label::Tv
        } else {
            Label::NonTv
        }
    }

    pub fn is_tv(self) -> bool {
        self == Label::Tv
    }

    pub fn flipped(self) -> Self {
        Self::from_bool(!self.is_tv())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    pub label: Label,
}

impl LabeledSample {
    pub fn new(features: Vec<f64>, label: Label) -> Self {
        Self { features, label }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }

    /// RBF with `gamma = 1 / dims`.
    pub fn default_rbf(dims: usize) -> Self {
        Kernel::Rbf {
            gamma: 1.0 / dims.max(1) as f64,
        }
    }
}

/// Per-dimension mean and standard deviation of a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub mean: Vec<f64>,
    /// Zero-variance dimensions are stored as 1.
    pub std: Vec<f64>,
}

impl Standardization {
    pub fn dims(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

fn check_dims(samples: &[LabeledSample]) -> Result<usize> {
    let dims = samples
        .first()
        .map(|s| s.features.len())
        .ok_or_else(|| Error::InsufficientData("no samples".into()))?;
    if dims == 0 {
        return Err(Error::Shape("samples have no features".into()));
    }
    for (i, s) in samples.iter().enumerate() {
        if s.features.len() != dims {
            return Err(Error::Shape(format!(
                "sample {i} has {} features, expected {dims}",
                s.features.len()
            )));
        }
        if s.features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("sample {i} has non-finite features")));
        }
    }
    Ok(dims)
}

/// Population mean and standard deviation per dimension.
pub fn standardize_fit(samples: &[LabeledSample]) -> Result<Standardization> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "standardization needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let dims = check_dims(samples)?;
    let n = samples.len() as f64;
    let mut mean = vec![0.0; dims];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(&s.features) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dims];
    for s in samples {
        for ((acc, v), m) in var.iter_mut().zip(&s.features).zip(&mean) {
            *acc += (v - m) * (v - m);
        }
    }
    let std = var
        .into_iter()
        .zip(&mean)
        .map(|(v, m)| {
            let sd = (v / n).sqrt();
            // Rounding noise on a constant column is not real variance.
            if sd <= 1e-12 * m.abs().max(1.0) {
                1.0
            } else {
                sd
            }
        })
        .collect();
    Ok(Standardization { mean, std })
}

/// A trained classifier; immutable and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub c: f64,
    /// Standardized support vectors.
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` per support vector.
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub standardization: Standardization,
    /// Columns of the flattened feature vector the model was trained on.
    pub feature_columns: Vec<usize>,
}

impl SvmModel {
    pub fn dims(&self) -> usize {
        self.standardization.dims()
    }

    /// Signed distance proxy; positive means TV.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dims() {
            return Err(Error::Shape(format!(
                "model expects {} features, got {}",
                self.dims(),
                x.len()
            )));
        }
        let z = self.standardization.apply(x);
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.alphas)
            .map(|(sv, a)| a * self.kernel.eval(sv, &z))
            .sum::<f64>()
            + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(Label::from_bool(self.decision_value(x)? > 0.0))
    }

    /// The feature columns as a subset of the acoustic feature vector.
    pub fn feature_subset(&self) -> Result<FeatureSubset> {
        FeatureSubset::from_indices(self.feature_columns.clone())
    }

    pub fn window_decision(&self, window: &FeatureVector) -> Result<f64> {
        let full = window.to_array();
        let x: Vec<f64> = self
            .feature_columns
            .iter()
            .map(|&i| {
                full.get(i).copied().ok_or_else(|| {
                    Error::Shape(format!("feature column {i} outside the acoustic vector"))
                })
            })
            .collect::<Result<_>>()?;
        self.decision_value(&x)
    }
}

/// Free-function form of [`SvmModel::decision_value`].
pub fn decision_value(model: &SvmModel, x: &[f64]) -> Result<f64> {
    model.decision_value(x)
}

/// Majority vote of per-window decisions; ties go to TV.
///
/// Returns the label and the fraction of windows voting TV.
pub fn classify_clip(model: &SvmModel, windows: &[FeatureVector]) -> Result<(Label, f64)> {
    if windows.is_empty() {
        return Err(Error::InsufficientData("no feature windows to classify".into()));
    }
    let mut votes = 0usize;
    for w in windows {
        if model.window_decision(w)? > 0.0 {
            votes += 1;
        }
    }
    let score = votes as f64 / windows.len() as f64;
    Ok((Label::from_bool(2 * votes >= windows.len()), score))
}
