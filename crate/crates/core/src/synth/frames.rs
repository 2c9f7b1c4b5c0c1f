use std::f64::consts::PI;

use rand::Rng as _;

use super::{rng, Rng, SceneClass, SceneSpec};
use crate::error::{Error, Result};
use crate::visual::image::GrayImage;

const DEFAULT_FRACTION: (f64, f64) = (0.12, 0.45);
const BLOCK: usize = 4;

struct Screen {
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
    bezel: usize,
    bezel_value: u8,
}

impl Screen {
    fn random(rng: &mut Rng, width: usize, height: usize, fraction: Option<f64>) -> Self {
        let f = fraction.unwrap_or_else(|| rng.gen_range(DEFAULT_FRACTION.0..DEFAULT_FRACTION.1));
        let aspect = rng.gen_range(1.3..1.8);
        let area = f * (width * height) as f64;
        let margin = 4;
        let w = ((area * aspect).sqrt().round() as usize).clamp(6, width - 2 * margin);
        let h = ((area / w as f64).round() as usize).clamp(6, height - 2 * margin);
        let x0 = rng.gen_range(margin..=width - margin - w);
        let y0 = rng.gen_range(margin..=height - margin - h);
        let bezel = rng.gen_range(4..=6).min(w.min(h) / 3);
        Self {
            x0,
            y0,
            w,
            h,
            bezel,
            bezel_value: rng.gen_range(10..=30),
        }
    }

    fn contains(&self, x: usize, y: usize) -> bool {
        (self.x0..self.x0 + self.w).contains(&x) && (self.y0..self.y0 + self.h).contains(&y)
    }

    fn in_bezel(&self, x: usize, y: usize) -> bool {
        self.contains(x, y)
            && (x < self.x0 + self.bezel
                || x >= self.x0 + self.w - self.bezel
                || y < self.y0 + self.bezel
                || y >= self.y0 + self.h - self.bezel)
    }
}

/// Block noise covering the whole image; only the screen interior is used.
fn block_noise(rng: &mut Rng, width: usize, height: usize, lo: u8, hi: u8) -> Vec<u8> {
    let bw = width.div_ceil(BLOCK);
    let blocks: Vec<u8> = (0..bw * height.div_ceil(BLOCK))
        .map(|_| rng.gen_range(lo..=hi))
        .collect();
    (0..width * height)
        .map(|i| blocks[(i / width / BLOCK) * bw + (i % width) / BLOCK])
        .collect()
}

struct Blob {
    radius: f64,
    lobes: f64,
    depth: f64,
    phase: f64,
    value: u8,
    start: (f64, f64),
    step: (f64, f64),
}

impl Blob {
    fn random(rng: &mut Rng, width: usize, height: usize, frames: usize, background: u8) -> Self {
        let radius = rng.gen_range(10.0..16.0f64).min(width.min(height) as f64 / 4.0);
        let reach = radius * 1.4;
        let theta = rng.gen_range(0.0..2.0 * PI);
        let speed = rng.gen_range(3.0..6.0);
        let span = (frames.saturating_sub(1)) as f64;
        let mut step = (speed * theta.cos(), speed * theta.sin());
        // Shrink the path until it fits inside the image.
        let (free_x, free_y) = (width as f64 - 2.0 * reach, height as f64 - 2.0 * reach);
        let scale = [free_x / (step.0.abs() * span), free_y / (step.1.abs() * span), 1.0]
            .into_iter()
            .filter(|s| s.is_finite())
            .fold(1.0f64, f64::min)
            .max(0.0);
        step = (step.0 * scale, step.1 * scale);
        let lo_x = reach + (-step.0 * span).max(0.0);
        let hi_x = width as f64 - reach - (step.0 * span).max(0.0);
        let lo_y = reach + (-step.1 * span).max(0.0);
        let hi_y = height as f64 - reach - (step.1 * span).max(0.0);
        let value = if background > 128 {
            background - rng.gen_range(60..=100)
        } else {
            background + rng.gen_range(60..=100)
        };
        Self {
            radius,
            lobes: rng.gen_range(5..=7) as f64,
            depth: rng.gen_range(0.25..0.4),
            phase: rng.gen_range(0.0..2.0 * PI),
            value,
            start: (rng.gen_range(lo_x..=hi_x.max(lo_x)), rng.gen_range(lo_y..=hi_y.max(lo_y))),
            step,
        }
    }

    fn covers(&self, frame: usize, x: usize, y: usize) -> bool {
        let cx = self.start.0 + self.step.0 * frame as f64;
        let cy = self.start.1 + self.step.1 * frame as f64;
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let r = self.radius * (1.0 + self.depth * (self.lobes * dy.atan2(dx) + self.phase).sin());
        dx * dx + dy * dy <= r * r
    }
}

/// Generates a shot of a visual scene class.
pub fn synth_frames(spec: &SceneSpec) -> Result<Vec<GrayImage>> {
    spec.validate()?;
    if spec.class.is_audio() {
        return Err(Error::InvalidConfig(format!(
            "{} is not a visual scene class",
            spec.class
        )));
    }
    if spec.frames == 0 {
        return Err(Error::InvalidConfig("a shot needs at least one frame".into()));
    }
    let (w, h) = (spec.width, spec.height);
    // Validates the size before any geometry depends on it.
    GrayImage::filled(w, h, 0)?;
    if w < 32 || h < 32 {
        return Err(Error::InvalidConfig(format!("{w}x{h} is too small for a scene")));
    }

    let mut rng = rng(spec.seed);
    let base = rng.gen_range(110.0..180.0);
    let (gx, gy) = (rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let mut scene: Vec<u8> = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            (base + gx * (x - cx) + gy * (y - cy)).round().clamp(0.0, 255.0) as u8
        })
        .collect();

    let screen = matches!(spec.class, SceneClass::TvScreen | SceneClass::PictureFrame)
        .then(|| Screen::random(&mut rng, w, h, spec.rect_fraction));
    if let Some(s) = &screen {
        let picture = block_noise(&mut rng, w, h, 60, 200);
        for y in 0..h {
            for x in 0..w {
                if s.in_bezel(x, y) {
                    scene[y * w + x] = s.bezel_value;
                } else if s.contains(x, y) {
                    scene[y * w + x] = picture[y * w + x];
                }
            }
        }
    }
    let blob = (spec.class == SceneClass::MovingBlob)
        .then(|| Blob::random(&mut rng, w, h, spec.frames, base as u8));

    let noise = spec.noise_level.round() as i32;
    (0..spec.frames)
        .map(|f| {
            let mut px = scene.clone();
            if spec.class == SceneClass::TvScreen {
                let s = screen.as_ref().expect("screen");
                let content = block_noise(&mut rng, w, h, 0, 255);
                for y in 0..h {
                    for x in 0..w {
                        if s.contains(x, y) && !s.in_bezel(x, y) {
                            px[y * w + x] = content[y * w + x];
                        }
                    }
                }
            }
            if let Some(b) = &blob {
                for y in 0..h {
                    for x in 0..w {
                        if b.covers(f, x, y) {
                            px[y * w + x] = b.value;
                        }
                    }
                }
            }
            if noise > 0 {
                for p in px.iter_mut() {
                    *p = (*p as i32 + rng.gen_range(-noise..=noise)).clamp(0, 255) as u8;
                }
            }
            GrayImage::new(w, h, px)
        })
        .collect()
}
