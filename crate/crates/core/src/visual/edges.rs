use super::image::GrayImage;

/// Sobel gradient magnitude per pixel, borders replicated.
pub fn sobel_magnitude(img: &GrayImage) -> Vec<f64> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let at = |x: isize, y: isize| img.get(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize) as f64;
    let mut out = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            let gx = at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x - 1, y)
                - at(x - 1, y + 1);
            let gy = at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x, y - 1)
                - at(x + 1, y - 1);
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

/// Binary edge map: 255 where the Sobel magnitude exceeds mean + one
/// standard deviation of all magnitudes, 0 elsewhere.
pub fn binarize_edges(frame: &GrayImage) -> GrayImage {
    let mag = sobel_magnitude(frame);
    let n = mag.len() as f64;
    let mean = mag.iter().sum::<f64>() / n;
    let sd = (mag.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / n).sqrt();
    let threshold = mean + sd;
    let pixels = mag
        .iter()
        .map(|&m| if m > threshold && m > 0.0 { 255 } else { 0 })
        .collect();
    GrayImage::new(frame.width(), frame.height(), pixels).expect("same shape as input")
}
