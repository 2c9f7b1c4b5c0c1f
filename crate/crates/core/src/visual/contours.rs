//! Topological border following on binary images.
//!
//! Foreground pixels are 8-connected and background pixels 4-connected.
//! Both outer and hole borders are traced so the label image stays
//! consistent, but only the outer border of each foreground component is
//! returned.

use super::geometry::Point;
use super::image::GrayImage;

/// Closed boundary of one foreground region, in tracing order.
///
/// Isolated pixels and thin strokes produce contours with fewer than four
/// points; downstream shape filters discard those.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    pub points: Vec<Point>,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Neighbour offsets `(drow, dcol)` in counterclockwise order starting east.
const DIRS: [(isize, isize); 8] = [
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
];

fn dir_of(dr: isize, dc: isize) -> usize {
    DIRS.iter()
        .position(|&d| d == (dr, dc))
        .expect("neighbour offset")
}

struct Labels {
    w: usize,
    f: Vec<i32>,
}

impl Labels {
    fn at(&self, r: usize, c: usize) -> i32 {
        self.f[r * self.w + c]
    }

    fn set(&mut self, r: usize, c: usize, v: i32) {
        self.f[r * self.w + c] = v;
    }

    fn step(r: usize, c: usize, d: usize) -> (usize, usize) {
        let (dr, dc) = DIRS[d];
        ((r as isize + dr) as usize, (c as isize + dc) as usize)
    }

    /// Follows one border starting at `(r, c)` whose known zero neighbour is
    /// in direction `from`. Returns the visited pixels.
    fn follow(&mut self, r: usize, c: usize, from: usize, nbd: i32) -> Vec<(usize, usize)> {
        // Clockwise search from the zero neighbour for any nonzero pixel.
        let first = (0..8)
            .map(|k| (from + 8 - k) % 8)
            .find(|&d| {
                let (nr, nc) = Self::step(r, c, d);
                self.at(nr, nc) != 0
            });
        let Some(first_dir) = first else {
            self.set(r, c, -nbd);
            return vec![(r, c)];
        };
        let (r1, c1) = Self::step(r, c, first_dir);
        let (mut r2, mut c2) = (r1, c1);
        let (mut r3, mut c3) = (r, c);
        let mut visited = Vec::new();
        loop {
            visited.push((r3, c3));
            // Counterclockwise search starting just after (r2, c2).
            let start = dir_of(r2 as isize - r3 as isize, c2 as isize - c3 as isize);
            let mut east_zero = false;
            let mut next = None;
            for k in 1..=8 {
                let d = (start + k) % 8;
                let (nr, nc) = Self::step(r3, c3, d);
                if self.at(nr, nc) != 0 {
                    next = Some((nr, nc));
                    break;
                }
                if d == 0 {
                    east_zero = true;
                }
            }
            let (r4, c4) = next.expect("border pixel has a nonzero neighbour");
            if east_zero {
                self.set(r3, c3, -nbd);
            } else if self.at(r3, c3) == 1 {
                self.set(r3, c3, nbd);
            }
            if (r4, c4) == (r, c) && (r3, c3) == (r1, c1) {
                break;
            }
            (r2, c2) = (r3, c3);
            (r3, c3) = (r4, c4);
        }
        visited
    }
}

/// Outer borders of every 8-connected nonzero region, in raster order of
/// their starting pixel.
pub fn find_contours(binary: &GrayImage) -> Vec<Contour> {
    let (w, h) = (binary.width() + 2, binary.height() + 2);
    let mut labels = Labels {
        w,
        f: vec![0; w * h],
    };
    for y in 0..binary.height() {
        for x in 0..binary.width() {
            if binary.get(x, y) != 0 {
                labels.set(y + 1, x + 1, 1);
            }
        }
    }

    let mut contours = Vec::new();
    let mut nbd = 1;
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            let v = labels.at(r, c);
            if v == 1 && labels.at(r, c - 1) == 0 {
                nbd += 1;
                let pts = labels.follow(r, c, 4, nbd);
                contours.push(Contour {
                    points: pts
                        .into_iter()
                        .map(|(pr, pc)| Point::new(pc as i32 - 1, pr as i32 - 1))
                        .collect(),
                });
            } else if v >= 1 && labels.at(r, c + 1) == 0 {
                nbd += 1;
                labels.follow(r, c, 0, nbd);
            }
        }
    }
    contours
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn image(w: usize, h: usize, on: impl Fn(usize, usize) -> bool) -> GrayImage {
        let mut img = GrayImage::filled(w, h, 0).unwrap();
        for y in 0..h {
            for x in 0..w {
                if on(x, y) {
                    img.set(x, y, 255);
                }
            }
        }
        img
    }

    #[test]
    fn filled_square_has_36_border_points() {
        let img = image(20, 20, |x, y| (5..15).contains(&x) && (5..15).contains(&y));
        let contours = find_contours(&img);
        assert_eq!(contours.len(), 1);
        assert_eq!(contours[0].len(), 36);
        assert_eq!(contours[0].points[0], Point::new(5, 5));
        let unique: BTreeSet<_> = contours[0].points.iter().collect();
        assert_eq!(unique.len(), 36);
    }

    #[test]
    fn two_squares_two_contours() {
        let img = image(30, 12, |x, y| {
            (1..5).contains(&y) && ((2..6).contains(&x) || (20..25).contains(&x))
        });
        assert_eq!(find_contours(&img).len(), 2);
    }

    #[test]
    fn ring_reports_only_its_outer_border() {
        let img = image(20, 20, |x, y| {
            let inside = (3..17).contains(&x) && (3..17).contains(&y);
            let hole = (6..14).contains(&x) && (6..14).contains(&y);
            inside && !hole
        });
        let contours = find_contours(&img);
        assert_eq!(contours.len(), 1);
        assert_eq!(contours[0].len(), 4 * 13);
    }

    #[test]
    fn island_inside_a_hole_is_found() {
        let img = image(24, 24, |x, y| {
            let ring = (2..22).contains(&x) && (2..22).contains(&y)
                && !((5..19).contains(&x) && (5..19).contains(&y));
            let island = (10..14).contains(&x) && (10..14).contains(&y);
            ring || island
        });
        assert_eq!(find_contours(&img).len(), 2);
    }

    #[test]
    fn single_pixel_and_empty() {
        assert!(find_contours(&GrayImage::filled(10, 10, 0).unwrap()).is_empty());
        let img = image(10, 10, |x, y| x == 4 && y == 4);
        let c = find_contours(&img);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].points, vec![Point::new(4, 4)]);
    }
}
