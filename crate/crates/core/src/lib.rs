//! Detects an operating TV set from microphone audio and camera frames.
//!
//! The acoustic path extracts zero-crossing rate, short-time energy,
//! spectral centroid/spread and MFCCs per one-second window and classifies
//! them with a kernel SVM. The visual path looks for a rectangle that
//! encloses every changing region of a short frame sequence. The two
//! verdicts are fused with an OR rule by default.

pub mod acoustic;
pub mod audio_io;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod svm;
pub mod synth;
pub mod visual;

pub use audio_io::{read_wav, resample, write_wav, AudioClip};
pub use error::{Error, Result};
pub use fusion::{fuse, run_pipeline, ControllerConfig, DetectionRecord, FusionRule};
