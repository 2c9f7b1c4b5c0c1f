//! Per-pixel adaptive Gaussian mixture background model.
//!
//! Each pixel keeps up to `components` Gaussians sorted by weight. A sample
//! matches the first component within `match_sigmas` standard deviations.
//! Components whose preceding cumulative weight is below
//! `background_fraction` describe the background. The effective learning
//! rate starts at 1 and decays as `1/n` until it reaches `learning_rate`, so
//! the model is usable after the first frame.

use super::image::{ForegroundMask, GrayImage};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BackgroundParams {
    pub components: usize,
    pub learning_rate: f64,
    pub match_sigmas: f64,
    pub background_fraction: f64,
    pub variance_floor: f64,
    pub initial_variance: f64,
}

impl Default for BackgroundParams {
    fn default() -> Self {
        Self {
            components: 3,
            learning_rate: 0.02,
            match_sigmas: 2.5,
            background_fraction: 0.7,
            variance_floor: 4.0,
            initial_variance: 36.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone)]
pub struct BackgroundModel {
    width: usize,
    height: usize,
    params: BackgroundParams,
    frames_seen: u64,
    /// `components` slots per pixel; only the first `active[p]` are live.
    mixture: Vec<Gaussian>,
    active: Vec<u8>,
}

impl BackgroundModel {
    pub fn new(width: usize, height: usize, params: BackgroundParams) -> Result<Self> {
        if params.components == 0 || params.components > u8::MAX as usize {
            return Err(Error::InvalidConfig("component count must be in 1..=255".into()));
        }
        if !(params.learning_rate > 0.0 && params.learning_rate < 1.0) {
            return Err(Error::InvalidConfig("learning rate must be in (0, 1)".into()));
        }
        if !(params.variance_floor > 0.0 && params.match_sigmas > 0.0) {
            return Err(Error::InvalidConfig(
                "variance floor and match threshold must be positive".into(),
            ));
        }
        let empty = Gaussian {
            weight: 0.0,
            mean: 0.0,
            variance: params.initial_variance,
        };
        Ok(Self {
            width,
            height,
            params,
            frames_seen: 0,
            mixture: vec![empty; width * height * params.components],
            active: vec![0; width * height],
        })
    }

    pub fn params(&self) -> &BackgroundParams {
        &self.params
    }

    pub fn frames_seen(&self) -> u64 {
        self.frames_seen
    }

    /// The live components of one pixel, heaviest first.
    pub fn pixel(&self, x: usize, y: usize) -> &[Gaussian] {
        let p = y * self.width + x;
        let k = self.params.components;
        &self.mixture[p * k..p * k + self.active[p] as usize]
    }

    /// Classifies `frame` against the current model, then folds it in.
    pub fn update(&mut self, frame: &GrayImage) -> Result<ForegroundMask> {
        if frame.width() != self.width || frame.height() != self.height {
            return Err(Error::Shape(format!(
                "{}x{} frame given to a {}x{} background model",
                frame.width(),
                frame.height(),
                self.width,
                self.height
            )));
        }
        self.frames_seen += 1;
        let lr = (1.0 / self.frames_seen as f64).max(self.params.learning_rate);
        let k = self.params.components;
        let params = self.params;
        let bits = frame
            .pixels()
            .iter()
            .enumerate()
            .map(|(p, &value)| {
                let slots = &mut self.mixture[p * k..(p + 1) * k];
                update_pixel(slots, &mut self.active[p], value as f64, lr, &params)
            })
            .collect();
        Ok(ForegroundMask {
            width: self.width,
            height: self.height,
            bits,
        })
    }
}

/// Returns `true` when the sample is foreground.
fn update_pixel(
    slots: &mut [Gaussian],
    active: &mut u8,
    x: f64,
    lr: f64,
    params: &BackgroundParams,
) -> bool {
    let n = *active as usize;
    let threshold = params.match_sigmas * params.match_sigmas;

    let mut matched = None;
    let mut background = false;
    let mut cumulative = 0.0;
    for (i, g) in slots[..n].iter().enumerate() {
        let d = x - g.mean;
        if d * d <= threshold * g.variance {
            matched = Some(i);
            background = cumulative < params.background_fraction;
            break;
        }
        cumulative += g.weight;
    }

    for g in &mut slots[..n] {
        g.weight *= 1.0 - lr;
    }
    match matched {
        Some(i) => {
            let g = &mut slots[i];
            g.weight += lr;
            let rho = (lr / g.weight).min(1.0);
            let d = x - g.mean;
            g.mean += rho * d;
            g.variance = (g.variance + rho * (d * d - g.variance)).max(params.variance_floor);
        }
        None => {
            let slot = if n < slots.len() {
                *active += 1;
                n
            } else {
                // Weights were just decayed; drop the weakest entirely.
                n - 1
            };
            slots[slot] = Gaussian {
                weight: lr,
                mean: x,
                variance: params.initial_variance.max(params.variance_floor),
            };
        }
    }
    // Keep heaviest first; K is tiny so insertion sort is enough.
    let n = *active as usize;
    for i in 1..n {
        let mut j = i;
        while j > 0 && slots[j].weight > slots[j - 1].weight {
            slots.swap(j, j - 1);
            j -= 1;
        }
    }
    matched.is_none() || !background
}

/// Free-function form of [`BackgroundModel::update`].
pub fn update_background(model: &mut BackgroundModel, frame: &GrayImage) -> Result<ForegroundMask> {
    model.update(frame)
}
