//! Seeded generators for labelled audio clips and frame sequences.
//!
//! Audio classes differ in bandwidth and level: conversation is voiced
//! speech below 4 kHz, TV adds music-like partials up to 16 kHz at a
//! higher level, and laptop playback is the TV process low-passed to 8 kHz
//! and attenuated. Visual classes are a screen whose interior changes every
//! frame, the same bordered rectangle with a static interior, a moving blob
//! without a frame, and an empty scene.

mod audio;
mod corpus;
mod frames;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use audio::{synth_audio, SYNTH_RATE};
pub use corpus::{
    hex_digest, read_manifest, synth_corpus, AudioCounts, CorpusItem, CorpusSpec, CorpusSummary, ManifestEntry,
    VisualCounts, TEST_FRACTION,
};
pub use frames::synth_frames;

pub(crate) type Rng = ChaCha8Rng;

pub(crate) fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneClass {
    Tv,
    Laptop,
    Conversation,
    Silence,
    TvScreen,
    PictureFrame,
    MovingBlob,
    Empty,
}

impl SceneClass {
    pub const AUDIO: [SceneClass; 4] = [Self::Tv, Self::Laptop, Self::Conversation, Self::Silence];
    pub const VISUAL: [SceneClass; 4] = [
        Self::TvScreen,
        Self::PictureFrame,
        Self::MovingBlob,
        Self::Empty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Tv => "tv",
            Self::Laptop => "laptop",
            Self::Conversation => "conversation",
            Self::Silence => "silence",
            Self::TvScreen => "tv_screen",
            Self::PictureFrame => "picture_frame",
            Self::MovingBlob => "moving_blob",
            Self::Empty => "empty",
        }
    }

    pub fn is_audio(self) -> bool {
        Self::AUDIO.contains(&self)
    }

    /// Ground truth: does the scene contain an operating TV?
    pub fn is_tv(self) -> bool {
        matches!(self, Self::Tv | Self::TvScreen)
    }
}

impl fmt::Display for SceneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SceneClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::AUDIO
            .iter()
            .chain(Self::VISUAL.iter())
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scene class {s:?}")))
    }
}

/// Parameters of one generated scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub class: SceneClass,
    /// Audio length.
    pub duration_seconds: f64,
    /// Frames per shot.
    pub frames: usize,
    pub width: usize,
    pub height: usize,
    /// Playback level or proximity, in (0, 1].
    pub gain: f64,
    /// RMS of the additive audio noise floor, or the half-range of the
    /// per-frame pixel noise.
    pub noise_level: f64,
    /// Screen or frame area as a fraction of the image; drawn from the seed
    /// when absent.
    pub rect_fraction: Option<f64>,
    pub seed: u64,
}

impl SceneSpec {
    pub fn new(class: SceneClass, seed: u64) -> Self {
        let noise_level = if class.is_audio() { 5e-4 } else { 2.0 };
        Self {
            class,
            duration_seconds: 30.0,
            frames: 8,
            width: 160,
            height: 120,
            gain: 1.0,
            noise_level,
            rect_fraction: None,
            seed,
        }
    }

    pub fn with_duration(mut self, seconds: f64) -> Self {
        self.duration_seconds = seconds;
        self
    }

    pub fn with_gain(mut self, gain: f64) -> Self {
        self.gain = gain;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.gain > 0.0 && self.gain <= 1.0) {
            return Err(Error::InvalidConfig(format!("gain {} outside (0, 1]", self.gain)));
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise level {} must be non-negative",
                self.noise_level
            )));
        }
        if let Some(f) = self.rect_fraction {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "rectangle fraction {f} outside (0, 1)"
                )));
            }
        }
        Ok(())
    }
}
