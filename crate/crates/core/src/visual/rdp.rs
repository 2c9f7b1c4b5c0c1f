//! Ramer-Douglas-Peucker simplification of open polylines and closed contours.

use super::geometry::{convex_hull, Point};
use crate::error::{Error, Result};

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (px, py) = (p.x as f64, p.y as f64);
    let (ax, ay) = (a.x as f64, a.y as f64);
    let (dx, dy) = (b.x as f64 - ax, b.y as f64 - ay);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return (px - ax).hypot(py - ay);
    }
    let t = (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0);
    (px - ax - t * dx).hypot(py - ay - t * dy)
}

/// Distance from `p` to the nearest edge of the closed polygon.
pub fn distance_to_polygon(p: Point, poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

fn rdp_into(points: &[Point], epsilon: f64, out: &mut Vec<Point>) {
    // `out` already holds points[0]; this appends the rest of the kept points.
    let last = points.len() - 1;
    let (a, b) = (points[0], points[last]);
    let mut split = 0;
    let mut max = 0.0;
    for (i, &p) in points.iter().enumerate().take(last).skip(1) {
        let d = segment_distance(p, a, b);
        if d > max {
            max = d;
            split = i;
        }
    }
    if max > epsilon {
        rdp_into(&points[..=split], epsilon, out);
        rdp_into(&points[split..], epsilon, out);
    } else {
        out.push(b);
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")))
    }
}

/// Simplifies an open polyline, always keeping both endpoints.
pub fn simplify_polyline(points: &[Point], epsilon: f64) -> Result<Vec<Point>> {
    check_epsilon(epsilon)?;
    if points.len() < 2 {
        return Err(Error::DegenerateContour(format!(
            "polyline with {} points",
            points.len()
        )));
    }
    let mut out = vec![points[0]];
    rdp_into(points, epsilon, &mut out);
    Ok(out)
}

/// Endpoints of the point set's diameter, lexicographically smallest pair on ties.
fn diameter(points: &[Point]) -> (Point, Point) {
    let hull = convex_hull(points);
    let mut best = (hull[0], hull[0]);
    let mut best_d = -1i64;
    for (i, &a) in hull.iter().enumerate() {
        for &b in &hull[i + 1..] {
            let d = (a.x - b.x) as i64 * (a.x - b.x) as i64 + (a.y - b.y) as i64 * (a.y - b.y) as i64;
            let pair = if a < b { (a, b) } else { (b, a) };
            if d > best_d || (d == best_d && pair < best) {
                best_d = d;
                best = pair;
            }
        }
    }
    best
}

/// Simplifies a closed contour.
///
/// The contour is cut at the two endpoints of its diameter and each half
/// simplified as an open polyline. The result starts at the
/// lexicographically smaller endpoint and keeps the contour's orientation.
/// Running it again on its own output returns the same polygon.
pub fn simplify_rdp(contour: &[Point], epsilon: f64) -> Result<Vec<Point>> {
    check_epsilon(epsilon)?;
    if contour.len() < 3 {
        return Err(Error::DegenerateContour(format!(
            "contour with {} points",
            contour.len()
        )));
    }
    let (a, b) = diameter(contour);
    if a == b {
        return Err(Error::DegenerateContour("contour collapses to a point".into()));
    }
    let ia = contour.iter().position(|&p| p == a).expect("diameter endpoint");
    let n = contour.len();
    // Rotate so the contour starts at `a`, then close it.
    let ring: Vec<Point> = (0..=n).map(|k| contour[(ia + k) % n]).collect();
    let ib = ring.iter().position(|&p| p == b).expect("diameter endpoint");

    let mut out = vec![a];
    rdp_into(&ring[..=ib], epsilon, &mut out);
    rdp_into(&ring[ib..], epsilon, &mut out);
    out.pop(); // closing copy of `a`
    Ok(out)
}
