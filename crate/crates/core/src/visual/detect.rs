//! The three-step TV detector: changing regions, rectangle candidates, and
//! their intersection.

use serde::{Deserialize, Serialize};

use super::background::{BackgroundModel, BackgroundParams};
use super::contours::find_contours;
use super::edges::binarize_edges;
use super::geometry::{shoelace_area, Point, PointF};
use super::image::{ForegroundMask, GrayImage};
use super::rect::{rectangle_candidates_with, RectCandidate, RectParams};
use crate::error::{Error, Result};

/// How the changing regions and the rectangles are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntersectionMode {
    /// Smallest detected rectangle containing every foreground centre.
    #[default]
    Candidate,
    /// Axis-aligned bounding box of the foreground centres, reported when
    /// at least one rectangle candidate was also seen.
    Bbox,
}

/// What counts as one foreground centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterMode {
    /// Pixel centroid of each 8-connected mask component.
    #[default]
    Component,
    /// Point centroid of each outer contour of the mask.
    Contour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualConfig {
    pub background: BackgroundParams,
    pub rect: RectParams,
    /// Foreground regions smaller than this fraction of the image are ignored.
    pub min_component_fraction: f64,
    pub intersection: IntersectionMode,
    pub centers: CenterMode,
}

impl Default for VisualConfig {
    fn default() -> Self {
        Self {
            background: BackgroundParams::default(),
            rect: RectParams::default(),
            min_component_fraction: 0.005,
            intersection: IntersectionMode::Candidate,
            centers: CenterMode::Component,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualDetection {
    pub detected: bool,
    pub region: Option<RectCandidate>,
    /// Foreground centres accumulated over the sequence.
    pub centers: Vec<PointF>,
    /// Distinct rectangle candidates accumulated over the sequence.
    pub candidates: Vec<RectCandidate>,
}

/// Centroids of 8-connected components with at least `min_pixels` pixels.
pub fn component_centroids(mask: &ForegroundMask, min_pixels: usize) -> Vec<PointF> {
    let (w, h) = (mask.width, mask.height);
    let mut seen = vec![false; w * h];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    for start in 0..w * h {
        if !mask.bits[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut n, mut sx, mut sy) = (0usize, 0usize, 0usize);
        while let Some(p) = stack.pop() {
            let (x, y) = (p % w, p / w);
            n += 1;
            sx += x;
            sy += y;
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let q = ny as usize * w + nx as usize;
                    if mask.bits[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        if n >= min_pixels.max(1) {
            out.push(PointF::new(sx as f64 / n as f64, sy as f64 / n as f64));
        }
    }
    out
}

fn contour_centroids(mask: &ForegroundMask, min_area: f64) -> Result<Vec<PointF>> {
    let contours = find_contours(&mask.to_image()?);
    Ok(contours
        .iter()
        .filter(|c| shoelace_area(&c.points) >= min_area.max(0.0))
        .map(|c| {
            let n = c.points.len() as f64;
            PointF::new(
                c.points.iter().map(|p| p.x as f64).sum::<f64>() / n,
                c.points.iter().map(|p| p.y as f64).sum::<f64>() / n,
            )
        })
        .collect())
}

/// Runs the detector over a frame sequence.
///
/// The first frame only seeds the background model; centres are recorded
/// from the second frame on. Rectangle candidates are collected from every
/// frame.
pub fn detect_tv(frames: &[GrayImage], config: &VisualConfig) -> Result<VisualDetection> {
    if frames.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "visual detection needs at least 2 frames, got {}",
            frames.len()
        )));
    }
    let first = &frames[0];
    if let Some(bad) = frames.iter().position(|f| !f.same_shape(first)) {
        return Err(Error::Shape(format!(
            "frame {bad} is {}x{}, frame 0 is {}x{}",
            frames[bad].width(),
            frames[bad].height(),
            first.width(),
            first.height()
        )));
    }
    let image_area = first.area() as f64;
    let min_pixels = (config.min_component_fraction * image_area).ceil() as usize;
    let mut model = BackgroundModel::new(first.width(), first.height(), config.background)?;

    let mut centers = Vec::new();
    let mut candidates: Vec<RectCandidate> = Vec::new();
    for (i, frame) in frames.iter().enumerate() {
        let mask = model.update(frame)?;
        if i > 0 {
            match config.centers {
                CenterMode::Component => centers.extend(component_centroids(&mask, min_pixels)),
                CenterMode::Contour => centers.extend(contour_centroids(&mask, min_pixels as f64)?),
            }
        }
        let contours = find_contours(&binarize_edges(frame));
        for c in rectangle_candidates_with(&contours, image_area, &config.rect) {
            if !candidates.iter().any(|k| k.corners == c.corners) {
                candidates.push(c);
            }
        }
    }

    let region = if centers.is_empty() {
        None
    } else {
        match config.intersection {
            IntersectionMode::Candidate => candidates
                .iter()
                .filter(|c| centers.iter().all(|&p| c.contains(p)))
                .fold(None::<&RectCandidate>, |best, c| match best {
                    Some(b) if b.area <= c.area => Some(b),
                    _ => Some(c),
                })
                .cloned(),
            IntersectionMode::Bbox if !candidates.is_empty() => Some(bounding_box(&centers)),
            IntersectionMode::Bbox => None,
        }
    };
    Ok(VisualDetection {
        detected: region.is_some(),
        region,
        centers,
        candidates,
    })
}

fn bounding_box(points: &[PointF]) -> RectCandidate {
    let min_x = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min).floor() as i32;
    let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min).floor() as i32;
    let max_x = points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max).ceil() as i32;
    let max_y = points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max).ceil() as i32;
    RectCandidate::from_corners([
        Point::new(min_x, min_y),
        Point::new(max_x, min_y),
        Point::new(max_x, max_y),
        Point::new(min_x, max_y),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn needs_two_uniform_frames() {
        let f = GrayImage::filled(16, 16, 0).unwrap();
        assert!(matches!(
            detect_tv(std::slice::from_ref(&f), &VisualConfig::default()),
            Err(Error::InsufficientData(_))
        ));
        let g = GrayImage::filled(16, 20, 0).unwrap();
        assert!(matches!(
            detect_tv(&[f, g], &VisualConfig::default()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn centroids_skip_small_components() {
        let mut bits = vec![false; 20 * 10];
        for y in 2..6 {
            for x in 2..6 {
                bits[y * 20 + x] = true;
            }
        }
        bits[9 * 20 + 19] = true;
        let mask = ForegroundMask {
            width: 20,
            height: 10,
            bits,
        };
        assert_eq!(component_centroids(&mask, 2), vec![PointF::new(3.5, 3.5)]);
        assert_eq!(component_centroids(&mask, 1).len(), 2);
    }

    #[test]
    fn static_scene_has_no_detection() {
        let mut f = GrayImage::filled(64, 48, 200).unwrap();
        for y in 10..30 {
            for x in 10..40 {
                f.set(x, y, 30);
            }
        }
        let frames = vec![f; 8];
        let d = detect_tv(&frames, &VisualConfig::default()).unwrap();
        assert!(!d.detected);
        assert!(d.centers.is_empty());
        assert!(!d.candidates.is_empty());
    }
}
