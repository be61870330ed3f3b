#![allow(dead_code)]

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use qomega_core::LumaImage;

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

pub fn natural_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/natural")
}

/// The bundled 128×128 natural crops, sorted by name.
pub fn natural_crops() -> Vec<(String, LumaImage)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(natural_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "png"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, qomega::load_image(&p).unwrap())
        })
        .collect()
}

/// Central differences, one-sided on the border, over a row-major buffer.
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

pub fn svd_singular_values(gx: &[f64], gy: &[f64]) -> (f64, f64) {
    let g = DMatrix::from_fn(gx.len(), 2, |r, c| if c == 0 { gx[r] } else { gy[r] });
    let sv = g.singular_values();
    (sv[0].max(sv[1]), sv[0].min(sv[1]))
}

/// Sharpness of one patch treated as a standalone image, from the
/// eigenvalues of its 2×2 gradient tensor.
pub fn naive_patch_q(img: &LumaImage, x0: usize, y0: usize, m: usize) -> f64 {
    let patch: Vec<f64> = (0..m * m).map(|i| img.get(x0 + i % m, y0 + i / m)).collect();
    let (gx, gy) = naive_gradients(&patch, m, m);
    let a: f64 = gx.iter().map(|g| g * g).sum();
    let b: f64 = gx.iter().zip(&gy).map(|(x, y)| x * y).sum();
    let c: f64 = gy.iter().map(|g| g * g).sum();
    let disc = ((a - c).powi(2) + 4.0 * b * b).sqrt();
    let l1 = (a + c + disc) / 2.0;
    let l2 = if l1 > 0.0 {
        ((a * c - b * b) / l1).clamp(0.0, l1)
    } else {
        0.0
    };
    let (s1, s2) = (l1.sqrt(), l2.sqrt());
    s1 * (s1 - s2) / (s1 + s2 + 1e-12)
}

/// Ω by a direct sequential loop over `m`×`m` patches with the default
/// parameters (R = 5, α₀ = 1.2, 50 dB cap, flat-reference cap 10).
pub fn naive_omega(reference: &LumaImage, restored: &LumaImage, m: usize) -> f64 {
    let (w, h) = reference.dims();
    let mut total = 0.0;
    let mut count = 0;
    for py in (0..h - h % m).step_by(m) {
        for px in (0..w - w % m).step_by(m) {
            let q_ref = naive_patch_q(reference, px, py, m);
            let q_rest = naive_patch_q(restored, px, py, m);
            let alpha = if q_ref < 1e-12 {
                if q_rest < 1e-12 {
                    0.0
                } else {
                    10.0
                }
            } else {
                (q_rest - q_ref).abs() / q_ref
            };
            let sigma = 1.0 / (1.0 + (5.0 * (alpha - 1.2)).exp());
            let mut se = 0.0;
            for y in py..py + m {
                for x in px..px + m {
                    se += (reference.get(x, y) - restored.get(x, y)).powi(2);
                }
            }
            let mse = se / (m * m) as f64;
            let p = if mse == 0.0 {
                50.0
            } else {
                (-10.0 * mse.log10()).min(50.0)
            };
            total += (1.0 - sigma) * p + sigma * q_rest;
            count += 1;
        }
    }
    total / count as f64
}
