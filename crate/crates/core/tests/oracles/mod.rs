//! Independent reference implementations shared by the integration and
//! acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tvsense::svm::{Kernel, Label, LabeledSample, SvmModel};
use tvsense::visual::geometry::Point;
use tvsense::visual::image::GrayImage;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- SVM

/// Ten 2-D points with both labels, classes shifted apart but overlapping.
pub fn random_dataset(seed: u64, n: usize) -> Vec<LabeledSample> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let tv = i % 2 == 0;
            let shift = if tv { 0.6 } else { -0.6 };
            let x = vec![r.gen_range(-2.0..2.0) + shift, r.gen_range(-2.0..2.0) - shift];
            LabeledSample::new(x, Label::from_bool(tv))
        })
        .collect()
}

/// Z-scores with the population standard deviation; constant columns keep
/// unit scale.
pub fn standardized(samples: &[LabeledSample]) -> Vec<Vec<f64>> {
    let n = samples.len() as f64;
    let d = samples[0].features.len();
    let mean: Vec<f64> = (0..d)
        .map(|j| samples.iter().map(|s| s.features[j]).sum::<f64>() / n)
        .collect();
    let std: Vec<f64> = (0..d)
        .map(|j| {
            let v = samples.iter().map(|s| (s.features[j] - mean[j]).powi(2)).sum::<f64>() / n;
            if v > 0.0 {
                v.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    samples
        .iter()
        .map(|s| (0..d).map(|j| (s.features[j] - mean[j]) / std[j]).collect())
        .collect()
}

pub fn kernel_value(kernel: Kernel, a: &[f64], b: &[f64]) -> f64 {
    match kernel {
        Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        Kernel::Rbf { gamma } => {
            (-gamma * a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>()).exp()
        }
    }
}

pub fn labels(samples: &[LabeledSample]) -> Vec<f64> {
    samples
        .iter()
        .map(|s| if s.label.is_tv() { 1.0 } else { -1.0 })
        .collect()
}

/// `Q_ij = y_i y_j K(x_i, x_j)` on standardized inputs.
pub fn q_matrix(samples: &[LabeledSample], kernel: Kernel) -> Vec<Vec<f64>> {
    let x = standardized(samples);
    let y = labels(samples);
    (0..x.len())
        .map(|i| {
            (0..x.len())
                .map(|j| y[i] * y[j] * kernel_value(kernel, &x[i], &x[j]))
                .collect()
        })
        .collect()
}

/// Dual objective to maximize: `sum(a) - a'Qa / 2`.
pub fn dual_objective(q: &[Vec<f64>], a: &[f64]) -> f64 {
    let n = a.len();
    let quad: f64 = (0..n)
        .map(|i| (0..n).map(|j| a[i] * q[i][j] * a[j]).sum::<f64>())
        .sum();
    a.iter().sum::<f64>() - 0.5 * quad
}

fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - s) / m[row][row];
    }
    Some(x)
}

/// Exact dual optimum by enumerating every lower/upper/free partition.
///
/// For each partition the free variables solve the stationarity and
/// equality conditions; the best feasible point is the optimum when `Q` is
/// positive definite.
pub fn enumeration_optimum(q: &[Vec<f64>], y: &[f64], c: f64) -> f64 {
    let n = y.len();
    let mut best = f64::NEG_INFINITY;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0u8; n];
        let mut k = code;
        for s in state.iter_mut() {
            *s = (k % 3) as u8;
            k /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut a: Vec<f64> = state.iter().map(|&s| if s == 1 { c } else { 0.0 }).collect();
        if free.is_empty() {
            if y.iter().zip(&a).map(|(y, a)| y * a).sum::<f64>().abs() > 1e-9 {
                continue;
            }
        } else {
            // [Q_FF  y_F] [a_F]   [1 - Q_FB a_B]
            // [y_F'   0 ] [ b ] = [ -y_B' a_B  ]
            let f = free.len();
            let mut m = vec![vec![0.0; f + 1]; f + 1];
            let mut rhs = vec![0.0; f + 1];
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    m[r][s] = q[i][j];
                }
                m[r][f] = y[i];
                m[f][r] = y[i];
                rhs[r] = 1.0 - (0..n).filter(|j| state[*j] == 1).map(|j| q[i][j] * c).sum::<f64>();
            }
            rhs[f] = -(0..n).filter(|j| state[*j] == 1).map(|j| y[j] * c).sum::<f64>();
            let Some(sol) = solve(m, rhs) else { continue };
            if sol[..f].iter().any(|&v| v < -1e-12 || v > c + 1e-12) {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                a[i] = sol[r].clamp(0.0, c);
            }
        }
        best = best.max(dual_objective(q, &a));
    }
    best
}

/// Euclidean projection onto `{0 <= a <= C, y'a = 0}` by bisection on the
/// multiplier of the equality constraint.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lam: f64| -> Vec<f64> {
        v.iter().zip(y).map(|(v, y)| (v - lam * y).clamp(0.0, c)).collect()
    };
    let g = |lam: f64| at(lam).iter().zip(y).map(|(a, y)| a * y).sum::<f64>();
    let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Dual optimum by accelerated projected gradient ascent.
pub fn projected_gradient_optimum(q: &[Vec<f64>], y: &[f64], c: f64, iterations: usize) -> f64 {
    let n = y.len();
    let lipschitz = q
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(1e-12);
    let step = 1.0 / lipschitz;
    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0f64;
    for _ in 0..iterations {
        let grad: Vec<f64> = (0..n)
            .map(|i| 1.0 - (0..n).map(|j| q[i][j] * z[j]).sum::<f64>())
            .collect();
        let next = project(
            &z.iter().zip(&grad).map(|(z, g)| z + step * g).collect::<Vec<_>>(),
            y,
            c,
        );
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next
            .iter()
            .zip(&a)
            .map(|(n, o)| n + (t - 1.0) / t_next * (n - o))
            .collect();
        a = next;
        t = t_next;
    }
    dual_objective(q, &a)
}

/// Largest KKT residual of a trained model on its own training set.
pub fn kkt_violation(model: &SvmModel, samples: &[LabeledSample], alphas: &[f64], c: f64) -> f64 {
    samples
        .iter()
        .zip(alphas)
        .map(|(s, &a)| {
            let y = if s.label.is_tv() { 1.0 } else { -1.0 };
            let margin = y * model.decision_value(&s.features).unwrap();
            let eps = 1e-9 * c;
            if a <= eps {
                (1.0 - margin).max(0.0)
            } else if a >= c - eps {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            }
        })
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------- images

pub fn random_binary_image(seed: u64) -> GrayImage {
    let mut r = rng(seed);
    let w: usize = r.gen_range(8..=64);
    let h: usize = r.gen_range(8..=64);
    let density = r.gen_range(0.2..0.7);
    // Blocky noise gives regions with holes and nested islands.
    let block: usize = r.gen_range(1..=4);
    let cells: Vec<bool> = (0..w.div_ceil(block) * h.div_ceil(block))
        .map(|_| r.gen_bool(density))
        .collect();
    let cw = w.div_ceil(block);
    let pixels = (0..w * h)
        .map(|i| {
            let (x, y) = (i % w, i / w);
            if cells[(y / block) * cw + x / block] {
                255
            } else {
                0
            }
        })
        .collect();
    GrayImage::new(w, h, pixels).unwrap()
}

/// Outer boundary of every 8-connected foreground component.
///
/// A component's exterior is the 4-connected background reachable from
/// outside the image when every other component is erased. Its outer
/// boundary is the set of component pixels with a 4-neighbour in that
/// exterior.
pub fn flood_fill_boundaries(img: &GrayImage) -> Vec<BTreeSet<Point>> {
    let (w, h) = (img.width() as i32, img.height() as i32);
    let on = |x: i32, y: i32| x >= 0 && y >= 0 && x < w && y < h && img.get(x as usize, y as usize) != 0;
    let idx = |x: i32, y: i32| ((y + 1) * (w + 2) + (x + 1)) as usize;

    let mut comp = vec![usize::MAX; ((w + 2) * (h + 2)) as usize];
    let mut components: Vec<Vec<Point>> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !on(x, y) || comp[idx(x, y)] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut pts = Vec::new();
            let mut queue = VecDeque::from([(x, y)]);
            comp[idx(x, y)] = id;
            while let Some((cx, cy)) = queue.pop_front() {
                pts.push(Point::new(cx, cy));
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (cx + dx, cy + dy);
                        if on(nx, ny) && comp[idx(nx, ny)] == usize::MAX {
                            comp[idx(nx, ny)] = id;
                            queue.push_back((nx, ny));
                        }
                    }
                }
            }
            components.push(pts);
        }
    }

    components
        .iter()
        .enumerate()
        .map(|(id, pts)| {
            let mine = |x: i32, y: i32| x >= 0 && y >= 0 && x < w && y < h && comp[idx(x, y)] == id;
            let mut outside = vec![false; ((w + 2) * (h + 2)) as usize];
            let mut queue = VecDeque::from([(-1, -1)]);
            outside[idx(-1, -1)] = true;
            while let Some((cx, cy)) = queue.pop_front() {
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let (nx, ny) = (cx + dx, cy + dy);
                    if nx < -1 || ny < -1 || nx > w || ny > h || mine(nx, ny) || outside[idx(nx, ny)] {
                        continue;
                    }
                    outside[idx(nx, ny)] = true;
                    queue.push_back((nx, ny));
                }
            }
            pts.iter()
                .copied()
                .filter(|p| {
                    [(1, 0), (-1, 0), (0, 1), (0, -1)]
                        .iter()
                        .any(|(dx, dy)| outside[idx(p.x + dx, p.y + dy)])
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------- shapes

/// Closed perimeter of the axis-aligned rectangle with the given corners,
/// traced clockwise in image coordinates from `(x0, y0)`. Non-corner points
/// are pushed inward by up to `max_noise` pixels.
pub fn noisy_rectangle(seed: u64, x0: i32, y0: i32, x1: i32, y1: i32, max_noise: i32) -> Vec<Point> {
    let mut r = rng(seed);
    let mut jitter = || if max_noise > 0 { r.gen_range(0..=max_noise) } else { 0 };
    let mut pts = Vec::new();
    for x in x0..x1 {
        let d = if x == x0 { 0 } else { jitter() };
        pts.push(Point::new(x, y0 + d));
    }
    for y in y0..y1 {
        let d = if y == y0 { 0 } else { jitter() };
        pts.push(Point::new(x1 - d, y));
    }
    for x in (x0 + 1..=x1).rev() {
        let d = if x == x1 { 0 } else { jitter() };
        pts.push(Point::new(x, y1 - d));
    }
    for y in (y0 + 1..=y1).rev() {
        let d = if y == y1 { 0 } else { jitter() };
        pts.push(Point::new(x0 + d, y));
    }
    pts
}

/// A filled rectangle whose boundary-pixel polygon has area `w * h`.
pub fn filled_rect(img_w: usize, img_h: usize, x0: usize, y0: usize, w: usize, h: usize) -> GrayImage {
    let mut img = GrayImage::filled(img_w, img_h, 0).unwrap();
    for y in y0..=y0 + h {
        for x in x0..=x0 + w {
            img.set(x, y, 255);
        }
    }
    img
}
