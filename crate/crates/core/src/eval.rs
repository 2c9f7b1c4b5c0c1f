//! Detection metrics and parameter sweeps.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acoustic::{classify_audio, train_model, LabeledClip, TrainOptions};
use crate::dsp::features::FeatureConfig;
use crate::error::{Error, Result};
use crate::fusion::DetectionRecord;
use crate::svm::SvmModel;
use crate::visual::detect::{detect_tv, VisualConfig};
use crate::visual::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    pub fn add(&mut self, predicted: bool, truth: bool) {
        match (predicted, truth) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut c = Self::default();
        for (p, t) in pairs {
            c.add(p, t);
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.fp + self.tn
    }

    /// Rates over actual positives and negatives; both classes must be present.
    pub fn metrics(&self) -> Result<Metrics> {
        if self.positives() == 0 || self.negatives() == 0 {
            return Err(Error::UndefinedRate(format!(
                "{} positives and {} negatives; both classes are needed",
                self.positives(),
                self.negatives()
            )));
        }
        let fn_rate = self.fn_ as f64 / self.positives() as f64;
        let fp_rate = self.fp as f64 / self.negatives() as f64;
        let precision = if self.tp + self.fp == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        };
        let recall = 1.0 - fn_rate;
        let f_measure = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Ok(Metrics {
            fn_rate,
            fp_rate,
            precision,
            recall,
            f_measure,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub fn_rate: f64,
    pub fp_rate: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FN rate {:.3}, FP rate {:.3}, precision {:.3}, recall {:.3}, F {:.3}",
            self.fn_rate, self.fp_rate, self.precision, self.recall, self.f_measure
        )
    }
}

/// Which verdict of a record to score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Acoustic,
    Visual,
    Fused,
}

impl Modality {
    pub const ALL: [Modality; 3] = [Self::Acoustic, Self::Visual, Self::Fused];

    pub fn name(self) -> &'static str {
        match self {
            Self::Acoustic => "acoustic",
            Self::Visual => "visual",
            Self::Fused => "fused",
        }
    }

    pub fn verdict(self, record: &DetectionRecord) -> Option<bool> {
        match self {
            Self::Acoustic => record.acoustic.as_ref().map(|a| a.verdict),
            Self::Visual => record.visual.as_ref().map(|v| v.verdict),
            Self::Fused => Some(record.fused),
        }
    }
}

/// Confusion counts of one modality over records that carry its verdict.
///
/// Every record must have ground truth.
pub fn confusion(records: &[DetectionRecord], modality: Modality) -> Result<ConfusionCounts> {
    let mut c = ConfusionCounts::default();
    for r in records {
        let truth = r.ground_truth.ok_or_else(|| {
            Error::InsufficientData(format!("record {} has no ground truth", r.clip_id))
        })?;
        if let Some(v) = modality.verdict(r) {
            c.add(v, truth);
        }
    }
    Ok(c)
}

pub fn score(records: &[DetectionRecord], modality: Modality) -> Result<(ConfusionCounts, Metrics)> {
    let c = confusion(records, modality)?;
    Ok((c, c.metrics()?))
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: u32,
    pub counts: ConfusionCounts,
    /// Absent when the scored items do not cover both classes.
    pub metrics: Option<Metrics>,
    /// Items left out of this point, e.g. shots shorter than the frame count.
    pub skipped: usize,
}

fn defined(counts: ConfusionCounts) -> Option<Metrics> {
    counts
        .metrics()
        .map_err(|e| log::warn!("{e}"))
        .ok()
}

/// How the audio-rate sweep obtains its classifier.
#[derive(Debug, Clone, Copy)]
pub enum RateModel<'a> {
    /// One model, trained at the native rate, scores every rate.
    Fixed(&'a SvmModel),
    /// A model is retrained on the given clips at each rate.
    Retrain(&'a [LabeledClip], &'a TrainOptions),
}

/// Resamples, re-extracts and re-classifies the corpus at each rate.
pub fn sweep_audio_rate(
    corpus: &[LabeledClip],
    model: RateModel<'_>,
    rates: &[u32],
    features: &FeatureConfig,
) -> Result<Vec<SweepRow>> {
    if let Some(c) = corpus.iter().find(|c| rates.iter().any(|&r| r > c.clip.sample_rate)) {
        return Err(Error::UnsupportedDirection {
            source_rate: c.clip.sample_rate,
            target: *rates.iter().max().expect("non-empty"),
        });
    }
    rates
        .iter()
        .map(|&rate| {
            let retrained;
            let (model, features) = match model {
                RateModel::Fixed(m) => (m, features),
                RateModel::Retrain(train, options) => {
                    let opts = TrainOptions {
                        sample_rate: Some(rate),
                        ..(*options).clone()
                    };
                    retrained = train_model(train, &opts)?;
                    (&retrained, &options.features)
                }
            };
            let verdicts: Vec<(bool, bool)> = corpus
                .par_iter()
                .map(|c| {
                    let (label, _) = classify_audio(model, &c.clip, Some(rate), features)?;
                    Ok((label.is_tv(), c.is_tv))
                })
                .collect::<Result<_>>()?;
            let counts = ConfusionCounts::from_pairs(verdicts);
            log::info!("rate {rate} Hz: {counts:?}");
            Ok(SweepRow {
                value: rate,
                counts,
                metrics: defined(counts),
                skipped: 0,
            })
        })
        .collect()
}

/// A frame sequence with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledShot {
    pub id: String,
    pub frames: Vec<GrayImage>,
    pub is_tv: bool,
}

/// Truncates every shot to each frame count, detects and scores.
///
/// Shots with fewer frames than the count are skipped for that row.
pub fn sweep_frame_count(shots: &[LabeledShot], counts: &[usize], config: &VisualConfig) -> Result<Vec<SweepRow>> {
    if let Some(&bad) = counts.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidConfig(format!(
            "frame count {bad} is below the minimum of 2"
        )));
    }
    counts
        .iter()
        .map(|&n| {
            let outcomes: Vec<Option<(bool, bool)>> = shots
                .par_iter()
                .map(|s| {
                    if s.frames.len() < n {
                        log::warn!("{}: {} frames, {n} requested; skipped", s.id, s.frames.len());
                        return Ok(None);
                    }
                    Ok(Some((detect_tv(&s.frames[..n], config)?.detected, s.is_tv)))
                })
                .collect::<Result<_>>()?;
            let skipped = outcomes.iter().filter(|o| o.is_none()).count();
            let counts = ConfusionCounts::from_pairs(outcomes.into_iter().flatten());
            Ok(SweepRow {
                value: n as u32,
                counts,
                metrics: defined(counts),
                skipped,
            })
        })
        .collect()
}

const METRIC_COLUMNS: &str = "tp,fp,tn,fn,fn_rate,fp_rate,precision,recall,f_measure";

/// Undefined metrics are left as empty cells.
fn metric_fields(c: &ConfusionCounts, m: Option<&Metrics>) -> String {
    let rates = match m {
        Some(m) => format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6}",
            m.fn_rate, m.fp_rate, m.precision, m.recall, m.f_measure
        ),
        None => ",,,,".to_string(),
    };
    format!("{},{},{},{},{rates}", c.tp, c.fp, c.tn, c.fn_)
}

/// Comma-separated sweep table; `key` names the swept column.
pub fn write_sweep_csv<W: Write>(mut out: W, key: &str, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(out, "{key},{METRIC_COLUMNS},skipped")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.value, metric_fields(&r.counts, r.metrics.as_ref()), r.skipped)?;
    }
    Ok(())
}

/// Comma-separated table with one row per modality.
pub fn write_metrics_csv<W: Write>(mut out: W, rows: &[(Modality, ConfusionCounts, Metrics)]) -> std::io::Result<()> {
    writeln!(out, "modality,{METRIC_COLUMNS}")?;
    for (m, c, x) in rows {
        writeln!(out, "{},{}", m.name(), metric_fields(c, Some(x)))?;
    }
    Ok(())
}

/// Scores every modality that is present in at least one record and has
/// both classes.
pub fn score_all(records: &[DetectionRecord]) -> Result<Vec<(Modality, ConfusionCounts, Metrics)>> {
    let mut rows = Vec::new();
    for m in Modality::ALL {
        let c = confusion(records, m)?;
        if c.total() == 0 {
            continue;
        }
        match c.metrics() {
            Ok(x) => rows.push((m, c, x)),
            Err(e) if m != Modality::Fused => log::warn!("{}: {e}", m.name()),
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfect_detector() {
        let m = ConfusionCounts::new(5, 0, 5, 0).metrics().unwrap();
        assert_eq!((m.fn_rate, m.fp_rate, m.precision, m.recall, m.f_measure), (0.0, 0.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn acoustic_row_example() {
        let m = ConfusionCounts::new(87, 0, 60, 13).metrics().unwrap();
        assert_abs_diff_eq!(m.fn_rate, 0.13, epsilon = 1e-12);
        assert_eq!(m.fp_rate, 0.0);
        // P = 1, R = 0.87, F = 1.74 / 1.87.
        assert_abs_diff_eq!(m.f_measure, 1.74 / 1.87, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_cases() {
        assert!(matches!(ConfusionCounts::new(3, 0, 0, 1).metrics(), Err(Error::UndefinedRate(_))));
        assert!(matches!(ConfusionCounts::new(0, 0, 4, 0).metrics(), Err(Error::UndefinedRate(_))));
        let m = ConfusionCounts::new(0, 0, 4, 2).metrics().unwrap();
        assert_eq!(m.precision, 1.0);
        assert_eq!(m.recall, 0.0);
        assert_eq!(m.f_measure, 0.0);
    }

    #[test]
    fn sweep_table_shape() {
        let c = ConfusionCounts::new(1, 0, 1, 0);
        let rows = vec![
            SweepRow { value: 8000, counts: c, metrics: c.metrics().ok(), skipped: 0 },
            SweepRow { value: 9, counts: ConfusionCounts::default(), metrics: None, skipped: 2 },
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, "rate", &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        for l in &lines[1..] {
            assert_eq!(lines[0].split(',').count(), l.split(',').count());
        }
        assert!(lines[1].starts_with("8000,1,0,1,0,"));
        assert_eq!(lines[2], "9,0,0,0,0,,,,,,2");
    }

    #[test]
    fn frame_sweep_rejects_short_counts() {
        assert!(sweep_frame_count(&[], &[1], &VisualConfig::default()).is_err());
    }
}
