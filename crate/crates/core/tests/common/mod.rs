#![allow(dead_code)]

use nalgebra::DMatrix;
use qomega_core::LumaImage;

/// 64-bit LCG; the same sequence is produced by `scripts/oracle_values.py`.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

pub fn random_image(rng: &mut Lcg, w: usize, h: usize) -> LumaImage {
    let data = (0..w * h).map(|_| rng.next_f64()).collect();
    LumaImage::new(w, h, data).unwrap()
}

/// Central differences with one-sided differences on the border, written
/// out directly on a row-major buffer.
pub fn naive_gradients(data: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |x: usize, y: usize| data[y * w + x];
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            gx[y * w + x] = if x == 0 {
                at(1, y) - at(0, y)
            } else if x == w - 1 {
                at(x, y) - at(x - 1, y)
            } else {
                (at(x + 1, y) - at(x - 1, y)) / 2.0
            };
            gy[y * w + x] = if y == 0 {
                at(x, 1) - at(x, 0)
            } else if y == h - 1 {
                at(x, y) - at(x, y - 1)
            } else {
                (at(x, y + 1) - at(x, y - 1)) / 2.0
            };
        }
    }
    (gx, gy)
}

/// Singular values of the stacked `n×2` gradient matrix by a general SVD.
pub fn svd_singular_values(gx: &[f64], gy: &[f64]) -> (f64, f64) {
    let g = DMatrix::from_fn(gx.len(), 2, |r, c| if c == 0 { gx[r] } else { gy[r] });
    let sv = g.singular_values();
    (sv[0].max(sv[1]), sv[0].min(sv[1]))
}

pub fn q_from_singular_values(s1: f64, s2: f64) -> (f64, f64) {
    let coherence = (s1 - s2) / (s1 + s2 + 1e-12);
    (coherence, s1 * coherence)
}
