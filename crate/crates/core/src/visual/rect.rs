//! Rectangle-shaped contour selection.

use serde::{Deserialize, Serialize};

use super::contours::Contour;
use super::geometry::{convex_contains, is_convex, perimeter, shoelace_area, Point, PointF};
use super::rdp::simplify_rdp;

/// Contours smaller than this fraction of the image are discarded.
pub const MIN_AREA_FRACTION: f64 = 0.05;
/// Contours larger than this fraction of the image are discarded.
pub const MAX_AREA_FRACTION: f64 = 0.70;
/// Default RDP tolerance as a fraction of contour perimeter.
pub const EPSILON_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectParams {
    pub epsilon_fraction: f64,
    pub min_area_fraction: f64,
    pub max_area_fraction: f64,
}

impl Default for RectParams {
    fn default() -> Self {
        Self {
            epsilon_fraction: EPSILON_FRACTION,
            min_area_fraction: MIN_AREA_FRACTION,
            max_area_fraction: MAX_AREA_FRACTION,
        }
    }
}

/// A convex quadrilateral found in a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectCandidate {
    pub corners: [Point; 4],
    pub area: f64,
    /// Mean of the corners.
    pub centroid: PointF,
}

impl RectCandidate {
    pub fn from_corners(corners: [Point; 4]) -> Self {
        let centroid = PointF::new(
            corners.iter().map(|p| p.x as f64).sum::<f64>() / 4.0,
            corners.iter().map(|p| p.y as f64).sum::<f64>() / 4.0,
        );
        Self {
            area: shoelace_area(&corners),
            corners,
            centroid,
        }
    }

    pub fn contains(&self, p: PointF) -> bool {
        convex_contains(&self.corners, p)
    }

    pub fn translated(&self, dx: i32, dy: i32) -> Self {
        Self::from_corners(self.corners.map(|c| c.translated(dx, dy)))
    }
}

/// Simplifies one contour and returns it as a candidate if it is a convex
/// quadrilateral within the area band.
pub fn rectangle_candidate(contour: &Contour, image_area: f64, params: &RectParams) -> Option<RectCandidate> {
    if contour.len() < 4 {
        return None;
    }
    let epsilon = params.epsilon_fraction * perimeter(&contour.points);
    let poly = simplify_rdp(&contour.points, epsilon).ok()?;
    if poly.len() != 4 || !is_convex(&poly) {
        return None;
    }
    let area = shoelace_area(&poly);
    let (lo, hi) = (
        params.min_area_fraction * image_area,
        params.max_area_fraction * image_area,
    );
    (area >= lo && area <= hi).then(|| RectCandidate::from_corners([poly[0], poly[1], poly[2], poly[3]]))
}

/// Four-corner convex contours whose area lies within 5%..70% of the image.
pub fn rectangle_candidates(contours: &[Contour], image_area: f64, epsilon_fraction: f64) -> Vec<RectCandidate> {
    let params = RectParams {
        epsilon_fraction,
        ..RectParams::default()
    };
    rectangle_candidates_with(contours, image_area, &params)
}

pub fn rectangle_candidates_with(contours: &[Contour], image_area: f64, params: &RectParams) -> Vec<RectCandidate> {
    if image_area <= 0.0 {
        return Vec::new();
    }
    contours
        .iter()
        .filter_map(|c| rectangle_candidate(c, image_area, params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::visual::contours::find_contours;
    use crate::visual::image::GrayImage;

    fn filled(w: usize, h: usize, on: impl Fn(i32, i32) -> bool) -> GrayImage {
        let mut img = GrayImage::filled(w, h, 0).unwrap();
        for y in 0..h {
            for x in 0..w {
                if on(x as i32, y as i32) {
                    img.set(x, y, 255);
                }
            }
        }
        img
    }

    fn rect_image(w: usize, h: usize, rw: i32, rh: i32) -> GrayImage {
        filled(w, h, |x, y| (10..10 + rw).contains(&x) && (10..10 + rh).contains(&y))
    }

    #[test]
    fn area_band_filters() {
        // 200x150 image, area 30000.
        let area = 30000.0;
        let small = rect_image(200, 150, 41, 31); // 40*30 = 1200 = 4%
        let big = rect_image(200, 150, 171, 141); // 170*140 = 23800 = 79%
        let ok = rect_image(200, 150, 101, 91); // 100*90 = 9000 = 30%
        let count = |img: &GrayImage| rectangle_candidates(&find_contours(img), area, EPSILON_FRACTION).len();
        assert_eq!(count(&small), 0);
        assert_eq!(count(&big), 0);
        assert_eq!(count(&ok), 1);
        let c = &rectangle_candidates(&find_contours(&ok), area, EPSILON_FRACTION)[0];
        assert_eq!(c.area, 9000.0);
        assert_eq!(c.centroid, PointF::new(60.0, 55.0));
    }

    #[test]
    fn empty_input() {
        assert!(rectangle_candidates(&[], 100.0, 0.02).is_empty());
    }
}
