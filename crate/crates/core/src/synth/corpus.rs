use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng as _;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::{rng, synth_audio, synth_frames, SceneClass, SceneSpec};
use crate::audio_io::write_wav;
use crate::error::{Error, Result};
use crate::visual::image::write_shot;

/// Share of each audio class held out for testing (60 of 151 clips).
pub const TEST_FRACTION: f64 = 60.0 / 151.0;

/// Per-class clip counts of the audio corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioCounts {
    pub train: Vec<(SceneClass, usize)>,
    pub test: Vec<(SceneClass, usize)>,
}

impl Default for AudioCounts {
    fn default() -> Self {
        use SceneClass::*;
        Self {
            train: vec![(Tv, 31), (Laptop, 30), (Conversation, 30)],
            test: vec![(Tv, 20), (Laptop, 20), (Conversation, 20)],
        }
    }
}

impl AudioCounts {
    /// Splits per-class totals into train and test using [`TEST_FRACTION`].
    pub fn split(totals: &[(SceneClass, usize)]) -> Self {
        let test_count = |n: usize| ((n as f64 * TEST_FRACTION).round() as usize).min(n);
        Self {
            train: totals.iter().map(|&(c, n)| (c, n - test_count(n))).collect(),
            test: totals.iter().map(|&(c, n)| (c, test_count(n))).collect(),
        }
    }
}

/// Per-class shot counts of the visual corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualCounts(pub Vec<(SceneClass, usize)>);

impl Default for VisualCounts {
    fn default() -> Self {
        use SceneClass::*;
        Self(vec![(TvScreen, 14), (PictureFrame, 4), (MovingBlob, 4), (Empty, 4)])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub audio: Option<AudioCounts>,
    pub visual: Option<VisualCounts>,
    pub seed: u64,
    pub duration_seconds: f64,
    pub frames_per_shot: usize,
    pub width: usize,
    pub height: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            audio: Some(AudioCounts::default()),
            visual: Some(VisualCounts::default()),
            seed: 0,
            duration_seconds: 30.0,
            frames_per_shot: 8,
            width: 160,
            height: 120,
        }
    }
}

/// One planned corpus member.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusItem {
    /// Path relative to the corpus root: a WAV file or a shot directory.
    pub path: String,
    pub split: String,
    pub spec: SceneSpec,
}

impl CorpusItem {
    pub fn manifest_line(&self) -> String {
        format!("{},{},{}", self.path, self.spec.class, self.split)
    }
}

fn derive_seed(seed: u64, split: &str, class: SceneClass, index: usize) -> u64 {
    let digest = Sha256::new()
        .chain_update(seed.to_le_bytes())
        .chain_update(split.as_bytes())
        .chain_update([0])
        .chain_update(class.name().as_bytes())
        .chain_update([0])
        .chain_update((index as u64).to_le_bytes())
        .finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

impl CorpusSpec {
    fn validate(&self) -> Result<()> {
        let audio = self.audio.iter().flat_map(|a| a.train.iter().chain(&a.test));
        let visual = self.visual.iter().flat_map(|v| v.0.iter());
        for &(class, _) in audio.clone() {
            if !class.is_audio() {
                return Err(Error::InvalidConfig(format!("{class} is not an audio class")));
            }
        }
        for &(class, _) in visual {
            if class.is_audio() {
                return Err(Error::InvalidConfig(format!("{class} is not a visual class")));
            }
        }
        if self.audio.is_none() && self.visual.is_none() {
            return Err(Error::InvalidConfig("corpus has no audio and no visual part".into()));
        }
        Ok(())
    }

    /// Every corpus member in manifest order, without generating any data.
    pub fn plan(&self) -> Result<Vec<CorpusItem>> {
        self.validate()?;
        let mut items = Vec::new();
        let mut ids = BTreeSet::new();
        let mut push = |split: &str, class: SceneClass, index: usize, dir: &str, ext: &str| {
            let item_seed = derive_seed(self.seed, split, class, index);
            if !ids.insert(item_seed) {
                return Err(Error::InvalidConfig(format!(
                    "derived id {item_seed:016x} repeats; pick another seed"
                )));
            }
            let mut spec = SceneSpec::new(class, item_seed);
            spec.gain = rng(item_seed ^ 0x9e37_79b9_7f4a_7c15).gen_range(0.4..=1.0);
            spec.duration_seconds = self.duration_seconds;
            spec.frames = self.frames_per_shot;
            spec.width = self.width;
            spec.height = self.height;
            items.push(CorpusItem {
                path: format!("{dir}/{split}/{class}_{item_seed:016x}{ext}"),
                split: split.to_string(),
                spec,
            });
            Ok(())
        };
        if let Some(audio) = &self.audio {
            for (split, counts) in [("train", &audio.train), ("test", &audio.test)] {
                for &(class, n) in counts {
                    for i in 0..n {
                        push(split, class, i, "audio", ".wav")?;
                    }
                }
            }
        }
        if let Some(visual) = &self.visual {
            for &(class, n) in &visual.0 {
                for i in 0..n {
                    push("test", class, i, "visual", "")?;
                }
            }
        }
        Ok(items)
    }
}

/// What [`synth_corpus`] wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSummary {
    pub items: Vec<CorpusItem>,
    /// Hex SHA-256 of `manifest.csv`.
    pub digest: String,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Generates the corpus under `root`.
///
/// Writes `manifest.csv` (every item), `train.csv` and `test.csv` (audio
/// items per split), `visual.csv` (shots) and `manifest.sha256`. Manifest
/// paths are relative to `root`.
pub fn synth_corpus(spec: &CorpusSpec, root: impl AsRef<Path>) -> Result<CorpusSummary> {
    let root = root.as_ref();
    let items = spec.plan()?;
    for dir in ["audio/train", "audio/test", "visual/test"] {
        let d = root.join(dir);
        std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    items.par_iter().try_for_each(|item| {
        let path = root.join(&item.path);
        if item.spec.class.is_audio() {
            write_wav(&synth_audio(&item.spec)?, path)
        } else {
            write_shot(&synth_frames(&item.spec)?, path)
        }
    })?;

    let lines = |keep: &dyn Fn(&CorpusItem) -> bool| {
        items.iter().filter(|i| keep(i)).fold(String::new(), |mut s, i| {
            let _ = writeln!(s, "{}", i.manifest_line());
            s
        })
    };
    let manifest = lines(&|_| true);
    write_text(&root.join("manifest.csv"), &manifest)?;
    if spec.audio.is_some() {
        write_text(&root.join("train.csv"), &lines(&|i| i.spec.class.is_audio() && i.split == "train"))?;
        write_text(&root.join("test.csv"), &lines(&|i| i.spec.class.is_audio() && i.split == "test"))?;
    }
    if spec.visual.is_some() {
        write_text(&root.join("visual.csv"), &lines(&|i| !i.spec.class.is_audio()))?;
    }
    let digest = hex_digest(manifest.as_bytes());
    write_text(&root.join("manifest.sha256"), &format!("{digest}  manifest.csv\n"))?;
    Ok(CorpusSummary { items, digest })
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// One manifest line with its path resolved against the manifest directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub class: String,
    pub split: Option<String>,
}

impl ManifestEntry {
    /// Ground truth: `tv` and `tv_screen` classes, or a literal positive label.
    pub fn is_tv(&self) -> bool {
        match self.class.parse::<SceneClass>() {
            Ok(c) => c.is_tv(),
            Err(_) => matches!(
                self.class.to_ascii_lowercase().as_str(),
                "1" | "true" | "positive" | "yes"
            ),
        }
    }

    /// Name used in detection records.
    pub fn id(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

/// Reads `path,class[,split]` lines; blank lines and `#` comments are skipped.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 || fields[0].is_empty() {
            return Err(Error::Format(format!(
                "{}:{}: expected path,class[,split]",
                path.display(),
                n + 1
            )));
        }
        out.push(ManifestEntry {
            path: base.join(fields[0]),
            class: fields[1].to_string(),
            split: fields.get(2).map(|s| s.to_string()),
        });
    }
    Ok(out)
}
