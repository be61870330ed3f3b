//! Forward discrete Fourier transforms of arbitrary length.
//!
//! Power-of-two lengths use an iterative radix-2 transform; other lengths go
//! through Bluestein's chirp-z reformulation on a padded power-of-two grid.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

fn bit_reverse_permute(buf: &mut [Complex64]) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    if bits == 0 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
}

/// In-place radix-2 transform; `sign = -1` forward, `+1` inverse (unscaled).
fn radix2(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    bit_reverse_permute(buf);
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let half = len / 2;
        let twiddles: Vec<Complex64> = (0..half).map(|k| Complex64::from_polar(1.0, ang * k as f64)).collect();
        for chunk in buf.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let t = *b * w;
                *b = *a - t;
                *a += t;
            }
        }
        len <<= 1;
    }
}

/// Precomputed plan for a forward DFT of fixed length.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    bluestein: Option<Bluestein>,
}

#[derive(Debug, Clone)]
struct Bluestein {
    padded: usize,
    chirp: Vec<Complex64>,
    kernel_spectrum: Vec<Complex64>,
}

impl Fft {
    pub fn new(len: usize) -> Self {
        if len.is_power_of_two() {
            return Fft { len, bluestein: None };
        }
        let padded = (2 * len - 1).next_power_of_two();
        // chirp[k] = exp(-iπk²/n); k² taken mod 2n to keep the angle small
        let chirp: Vec<Complex64> = (0..len)
            .map(|k| {
                let k2 = (k as u128 * k as u128 % (2 * len as u128)) as f64;
                Complex64::from_polar(1.0, -PI * k2 / len as f64)
            })
            .collect();
        let mut kernel = alloc::vec![Complex64::new(0.0, 0.0); padded];
        kernel[0] = chirp[0].conj();
        for k in 1..len {
            kernel[k] = chirp[k].conj();
            kernel[padded - k] = chirp[k].conj();
        }
        radix2(&mut kernel, -1.0);
        Fft {
            len,
            bluestein: Some(Bluestein {
                padded,
                chirp,
                kernel_spectrum: kernel,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized forward transform `X[k] = Σ x[j]·exp(-2πi·jk/n)`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len);
        match &self.bluestein {
            None => radix2(buf, -1.0),
            Some(b) => {
                let mut work = alloc::vec![Complex64::new(0.0, 0.0); b.padded];
                for ((w, x), c) in work.iter_mut().zip(buf.iter()).zip(&b.chirp) {
                    *w = x * c;
                }
                radix2(&mut work, -1.0);
                for (w, k) in work.iter_mut().zip(&b.kernel_spectrum) {
                    *w *= k;
                }
                radix2(&mut work, 1.0);
                let scale = 1.0 / b.padded as f64;
                for ((out, w), c) in buf.iter_mut().zip(&work).zip(&b.chirp) {
                    *out = w * c * scale;
                }
            }
        }
    }
}

/// Unnormalized 2-D forward DFT of a row-major `width`×`height` real grid.
pub fn dft2(data: &[f64], width: usize, height: usize) -> Vec<Complex64> {
    assert_eq!(data.len(), width * height);
    let mut out: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let rows = Fft::new(width);
    for row in out.chunks_exact_mut(width) {
        rows.forward(row);
    }
    let cols = Fft::new(height);
    let mut column = alloc::vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for (y, c) in column.iter_mut().enumerate() {
            *c = out[y * width + x];
        }
        cols.forward(&mut column);
        for (y, c) in column.iter().enumerate() {
            out[y * width + x] = *c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k % n) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_many_lengths() {
        for n in [1usize, 2, 3, 5, 7, 8, 12, 16, 17, 31, 64, 100] {
            let x: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new(libm::sin(i as f64 * 1.3) + 0.2, libm::cos(i as f64 * 0.7)))
                .collect();
            let mut y = x.clone();
            Fft::new(n).forward(&mut y);
            for (a, b) in y.iter().zip(naive(&x)) {
                assert!((a - b).norm() < 1e-10 * n as f64, "n = {n}");
            }
        }
    }

    #[test]
    fn dc_of_constant() {
        let out = dft2(&[0.25; 12], 4, 3);
        assert!((out[0].re - 3.0).abs() < 1e-12);
        assert!(out[1..].iter().all(|c| c.norm() < 1e-12));
    }
}
