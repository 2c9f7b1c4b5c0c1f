//! Iterative radix-2 FFT.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Precomputed twiddles and bit-reversal permutation for one transform size.
#[derive(Debug, Clone)]
pub struct Fft {
    size: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || !size.is_power_of_two() {
            return Err(Error::InvalidSize(format!(
                "FFT size {size} is not a power of two"
            )));
        }
        let bits = size.trailing_zeros();
        let bitrev = (0..size)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..size / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / size as f64))
            .collect();
        Ok(Self {
            size,
            twiddles,
            bitrev,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Forward transform in place (no normalization).
    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.size, "buffer length must match FFT size");
        for i in 0..self.size {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= self.size {
            let half = len / 2;
            let stride = self.size / len;
            for start in (0..self.size).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len *= 2;
        }
    }

    /// Transforms a real frame zero-padded to the FFT size.
    pub fn forward_real(&self, frame: &[f64], buf: &mut Vec<Complex64>) {
        assert!(frame.len() <= self.size, "frame longer than FFT size");
        buf.clear();
        buf.extend(frame.iter().map(|&x| Complex64::new(x, 0.0)));
        buf.resize(self.size, Complex64::new(0.0, 0.0));
        self.forward(buf);
    }
}
