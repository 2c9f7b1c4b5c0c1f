//! Decision fusion and the per-clip detection pipeline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::acoustic::classify_audio;
use crate::audio_io::AudioClip;
use crate::dsp::features::{FeatureConfig, FeatureSubset};
use crate::error::{Error, Result};
use crate::svm::SvmModel;
use crate::synth::SYNTH_RATE;
use crate::visual::detect::{detect_tv, VisualConfig};
use crate::visual::geometry::Point;
use crate::visual::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionRule {
    /// Positive when either modality is positive; a missing modality counts
    /// as negative.
    #[default]
    Or,
    /// Positive when both modalities are positive; a single present
    /// modality decides alone.
    And,
    AcousticOnly,
    VisualOnly,
}

impl FusionRule {
    pub fn name(self) -> &'static str {
        match self {
            Self::Or => "or",
            Self::And => "and",
            Self::AcousticOnly => "acoustic",
            Self::VisualOnly => "visual",
        }
    }
}

impl fmt::Display for FusionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "or" => Ok(Self::Or),
            "and" => Ok(Self::And),
            "acoustic" | "acoustic_only" => Ok(Self::AcousticOnly),
            "visual" | "visual_only" => Ok(Self::VisualOnly),
            _ => Err(Error::InvalidConfig(format!("unknown fusion rule {s:?}"))),
        }
    }
}

/// Combines the per-modality verdicts.
pub fn fuse(acoustic: Option<bool>, visual: Option<bool>, rule: FusionRule) -> Result<bool> {
    match (rule, acoustic, visual) {
        (_, None, None) => Err(Error::NoEvidence),
        (FusionRule::Or, a, v) => Ok(a.unwrap_or(false) || v.unwrap_or(false)),
        (FusionRule::And, a, v) => Ok(a.unwrap_or(true) && v.unwrap_or(true)),
        (FusionRule::AcousticOnly, a, _) => a.ok_or(Error::NoEvidence),
        (FusionRule::VisualOnly, _, v) => v.ok_or(Error::NoEvidence),
    }
}

/// Sensing and decision knobs of the controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub audio_sample_rate: u32,
    pub audio_window_seconds: f64,
    pub frames_per_shot: usize,
    pub feature_subset: FeatureSubset,
    pub fusion_rule: FusionRule,
    pub visual: VisualConfig,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            audio_sample_rate: SYNTH_RATE,
            audio_window_seconds: FeatureConfig::default().window_seconds,
            frames_per_shot: 8,
            feature_subset: FeatureSubset::all(),
            fusion_rule: FusionRule::Or,
            visual: VisualConfig::default(),
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frames_per_shot < 2 {
            return Err(Error::InvalidConfig(format!(
                "frames per shot must be at least 2, got {}",
                self.frames_per_shot
            )));
        }
        if self.audio_sample_rate == 0 {
            return Err(Error::InvalidConfig("audio sample rate must be positive".into()));
        }
        if !(self.audio_window_seconds > 0.0 && self.audio_window_seconds.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "audio window {} s must be positive",
                self.audio_window_seconds
            )));
        }
        Ok(())
    }

    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            window_seconds: self.audio_window_seconds,
            ..FeatureConfig::default()
        }
    }

    /// Hex SHA-256 of the JSON form of the configuration.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        crate::synth::hex_digest(&json)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcousticVerdict {
    pub verdict: bool,
    /// Fraction of windows voting TV.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualVerdict {
    pub verdict: bool,
    pub region: Option<[Point; 4]>,
}

/// Outcome of one clip or shot; serialized as one JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub clip_id: String,
    pub acoustic: Option<AcousticVerdict>,
    pub visual: Option<VisualVerdict>,
    pub fused: bool,
    #[serde(default)]
    pub ground_truth: Option<bool>,
    /// Modality failures that were dropped from the decision.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    #[serde(default)]
    pub config_digest: String,
}

impl DetectionRecord {
    /// Builds a record from whatever modality verdicts are present.
    pub fn from_verdicts(
        clip_id: impl Into<String>,
        acoustic: Option<AcousticVerdict>,
        visual: Option<VisualVerdict>,
        config: &ControllerConfig,
    ) -> Result<Self> {
        let fused = fuse(
            acoustic.as_ref().map(|a| a.verdict),
            visual.as_ref().map(|v| v.verdict),
            config.fusion_rule,
        )?;
        Ok(Self {
            clip_id: clip_id.into(),
            acoustic,
            visual,
            fused,
            ground_truth: None,
            errors: Vec::new(),
            config_digest: config.digest(),
        })
    }

    pub fn with_ground_truth(mut self, truth: bool) -> Self {
        self.ground_truth = Some(truth);
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Format(format!("detection record: {e}")))
    }
}

pub fn acoustic_verdict(model: &SvmModel, audio: &AudioClip, config: &ControllerConfig) -> Result<AcousticVerdict> {
    let rate = (audio.sample_rate != config.audio_sample_rate).then_some(config.audio_sample_rate);
    let (label, score) = classify_audio(model, audio, rate, &config.feature_config())?;
    Ok(AcousticVerdict {
        verdict: label.is_tv(),
        score,
    })
}

pub fn visual_verdict(frames: &[GrayImage], config: &ControllerConfig) -> Result<VisualVerdict> {
    let n = frames.len().min(config.frames_per_shot);
    let d = detect_tv(&frames[..n], &config.visual)?;
    Ok(VisualVerdict {
        verdict: d.detected,
        region: d.region.map(|r| r.corners),
    })
}

fn drop_failed<T>(
    outcome: Option<Result<T>>,
    clip_id: &str,
    stage: &str,
    errors: &mut Vec<String>,
    first_error: &mut Option<Error>,
) -> Option<T> {
    match outcome? {
        Ok(v) => Some(v),
        Err(e) => {
            log::warn!("{clip_id}: {stage} modality dropped: {e}");
            errors.push(format!("{stage}: {e}"));
            first_error.get_or_insert(e);
            None
        }
    }
}

/// Runs both modalities (in parallel) and fuses their verdicts.
///
/// A failing modality is dropped and its error recorded when the other one
/// succeeds; when every provided modality fails the first error is returned.
pub fn run_pipeline(
    audio: Option<&AudioClip>,
    frames: Option<&[GrayImage]>,
    model: &SvmModel,
    config: &ControllerConfig,
    clip_id: &str,
) -> Result<DetectionRecord> {
    config.validate()?;
    if audio.is_none() && frames.is_none() {
        return Err(Error::NoEvidence);
    }
    let (acoustic, visual) = rayon::join(
        || audio.map(|a| acoustic_verdict(model, a, config)),
        || frames.map(|f| visual_verdict(f, config)),
    );
    let mut errors = Vec::new();
    let mut first_error = None;
    let acoustic = drop_failed(acoustic, clip_id, "acoustic", &mut errors, &mut first_error);
    let visual = drop_failed(visual, clip_id, "visual", &mut errors, &mut first_error);
    if acoustic.is_none() && visual.is_none() {
        return Err(first_error.unwrap_or(Error::NoEvidence));
    }
    let mut record = DetectionRecord::from_verdicts(clip_id, acoustic, visual, config)?;
    record.errors = errors;
    Ok(record)
}
