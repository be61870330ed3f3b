//! Classical full-reference metrics and scalar loss evaluations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fft::dft2;
use crate::image::LumaImage;
use crate::sharpness::{compute_q, QParams};
use crate::stats::compensated_sum;

fn check(a: &LumaImage, b: &LumaImage) -> Result<()> {
    a.check_same_dims(b)
}

pub fn mse(a: &LumaImage, b: &LumaImage) -> Result<f64> {
    check(a, b)?;
    let sum = compensated_sum(a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)));
    Ok(sum / a.data().len() as f64)
}

/// PSNR in dB with peak 1.0. Identical images give `f64::INFINITY`.
pub fn psnr(a: &LumaImage, b: &LumaImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

#[inline]
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * libm::log10(mse)
    }
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn ssim_kernel() -> [f64; SSIM_WINDOW] {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut k = [0.0; SSIM_WINDOW];
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - r;
        *v = libm::exp(-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA));
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Valid-mode separable filtering: output is `(w − n + 1)`×`(h − n + 1)`.
fn filter_valid(src: &[f64], w: usize, h: usize, k: &[f64]) -> Vec<f64> {
    let n = k.len();
    let (ow, oh) = (w + 1 - n, h + 1 - n);
    let mut horiz = Vec::with_capacity(ow * h);
    for row in src.chunks_exact(w) {
        for x in 0..ow {
            horiz.push(row[x..x + n].iter().zip(k).map(|(a, b)| a * b).sum::<f64>());
        }
    }
    let mut out = alloc::vec![0.0; ow * oh];
    for y in 0..oh {
        let dst = &mut out[y * ow..(y + 1) * ow];
        for (j, &kj) in k.iter().enumerate() {
            let srow = &horiz[(y + j) * ow..(y + j + 1) * ow];
            for (d, s) in dst.iter_mut().zip(srow) {
                *d += kj * s;
            }
        }
    }
    out
}

/// Mean SSIM over all fully-contained 11×11 Gaussian windows (σ = 1.5),
/// `K1 = 0.01`, `K2 = 0.03`, dynamic range 1.
pub fn ssim(a: &LumaImage, b: &LumaImage) -> Result<f64> {
    check(a, b)?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            min_width: SSIM_WINDOW,
            min_height: SSIM_WINDOW,
        });
    }
    let k = ssim_kernel();
    let (x, y) = (a.data(), b.data());
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(p, q)| p * q).collect();
    let mx = filter_valid(x, w, h, &k);
    let my = filter_valid(y, w, h, &k);
    let sxx = filter_valid(&xx, w, h, &k);
    let syy = filter_valid(&yy, w, h, &k);
    let sxy = filter_valid(&xy, w, h, &k);
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let mut total = 0.0;
    for i in 0..mx.len() {
        let (ux, uy) = (mx[i], my[i]);
        let vx = sxx[i] - ux * ux;
        let vy = syy[i] - uy * uy;
        let cxy = sxy[i] - ux * uy;
        total += ((2.0 * ux * uy + c1) * (2.0 * cxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
    }
    Ok(total / mx.len() as f64)
}

pub fn l1_loss(a: &LumaImage, b: &LumaImage) -> Result<f64> {
    check(a, b)?;
    let sum: f64 = a.data().iter().zip(b.data()).map(|(x, y)| libm::fabs(x - y)).sum();
    Ok(sum / a.data().len() as f64)
}

/// Mean absolute spectral difference, with the forward transform scaled by
/// `1 / (w·h)`.
pub fn freq_loss(a: &LumaImage, b: &LumaImage) -> Result<f64> {
    check(a, b)?;
    let (w, h) = a.dims();
    let n = (w * h) as f64;
    // linearity: F(a) - F(b) = F(a - b)
    let diff: Vec<f64> = a.data().iter().zip(b.data()).map(|(x, y)| x - y).collect();
    if diff.iter().all(|&d| d == 0.0) {
        return Ok(0.0);
    }
    let spec = dft2(&diff, w, h);
    let sum: f64 = spec.iter().map(|c| libm::hypot(c.re, c.im)).sum();
    Ok(sum / (n * n))
}

/// The base fidelity term of the composite loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseLoss {
    L1,
    L1Freq,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    pub beta: f64,
    pub lambda_freq: f64,
    pub q: QParams,
}

impl Default for LossParams {
    fn default() -> Self {
        LossParams {
            beta: 0.1,
            lambda_freq: 1.0,
            q: QParams::default(),
        }
    }
}

/// `base(gt, restored) − β·Q(restored)`. May be negative.
pub fn composite_loss(gt: &LumaImage, restored: &LumaImage, base: BaseLoss, params: &LossParams) -> Result<f64> {
    if !(params.beta >= 0.0) {
        return Err(Error::param("beta", "must be non-negative"));
    }
    if !(params.lambda_freq >= 0.0) {
        return Err(Error::param("lambda_freq", "must be non-negative"));
    }
    let mut fidelity = l1_loss(gt, restored)?;
    if base == BaseLoss::L1Freq {
        fidelity += params.lambda_freq * freq_loss(gt, restored)?;
    }
    if params.beta == 0.0 {
        return Ok(fidelity);
    }
    let q = compute_q(restored, params.q.patch_size, params.q.tau)?.q;
    Ok(fidelity - params.beta * q)
}
