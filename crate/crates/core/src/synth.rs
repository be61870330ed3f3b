//! Synthetic degradation (Gaussian blur plus additive noise) and unsharp-mask
//! sharpening.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::image::{clamp_unit, LumaImage};

/// Blur and noise parameters: `G = I ∗ H_K + η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradeSpec {
    pub kernel_size: usize,
    pub sigma_blur: f64,
    pub sigma_noise: f64,
    pub seed: u64,
}

impl Default for DegradeSpec {
    fn default() -> Self {
        DegradeSpec {
            kernel_size: 9,
            sigma_blur: 2.0,
            sigma_noise: 0.0,
            seed: 0,
        }
    }
}

impl DegradeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.kernel_size % 2 == 0 {
            return Err(Error::param("kernel_size", "must be odd"));
        }
        if !(self.sigma_blur > 0.0) {
            return Err(Error::param("sigma_blur", "must be positive"));
        }
        if !(self.sigma_noise >= 0.0) {
            return Err(Error::param("sigma_noise", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpenSpec {
    pub gamma: f64,
    pub radius_sigma: f64,
}

impl Default for SharpenSpec {
    fn default() -> Self {
        SharpenSpec {
            gamma: 0.8,
            radius_sigma: 1.0,
        }
    }
}

impl SharpenSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) {
            return Err(Error::param("gamma", "must be non-negative"));
        }
        if !(self.radius_sigma > 0.0) {
            return Err(Error::param("radius_sigma", "must be positive"));
        }
        Ok(())
    }

    /// Odd support covering ±3σ.
    pub fn kernel_size(&self) -> usize {
        2 * (libm::ceil(3.0 * self.radius_sigma) as usize) + 1
    }
}

/// Normalized 1-D Gaussian of odd length `size`.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Result<Vec<f64>> {
    if size % 2 == 0 {
        return Err(Error::param("kernel_size", "must be odd"));
    }
    if !(sigma > 0.0) {
        return Err(Error::param("sigma", "must be positive"));
    }
    let r = (size / 2) as f64;
    let mut k: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - r;
            libm::exp(-d * d / (2.0 * sigma * sigma))
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    Ok(k)
}

/// Separable convolution with replicate-edge borders. Output is not clamped.
pub fn convolve_separable(img: &LumaImage, kernel: &[f64]) -> Result<Vec<f64>> {
    let (w, h) = img.dims();
    let n = kernel.len();
    if w < n || h < n {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            min_width: n,
            min_height: n,
        });
    }
    let r = n / 2;
    let mut horiz = alloc::vec![0.0; w * h];
    for (y, dst) in horiz.chunks_exact_mut(w).enumerate() {
        let src = img.row(y);
        for (x, d) in dst.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &kj) in kernel.iter().enumerate() {
                let sx = (x + j).saturating_sub(r).min(w - 1);
                acc += kj * src[sx];
            }
            *d = acc;
        }
    }
    let mut out = alloc::vec![0.0; w * h];
    for y in 0..h {
        let dst = &mut out[y * w..(y + 1) * w];
        for (j, &kj) in kernel.iter().enumerate() {
            let sy = (y + j).saturating_sub(r).min(h - 1);
            for (d, s) in dst.iter_mut().zip(&horiz[sy * w..(sy + 1) * w]) {
                *d += kj * s;
            }
        }
    }
    Ok(out)
}

/// `I ∗ H_K` with a normalized `K`×`K` Gaussian.
pub fn gaussian_blur(img: &LumaImage, spec: &DegradeSpec) -> Result<LumaImage> {
    spec.validate()?;
    let k = gaussian_kernel(spec.kernel_size, spec.sigma_blur)?;
    let out = convolve_separable(img, &k)?;
    LumaImage::from_clamped(img.width(), img.height(), out)
}

/// Adds seeded i.i.d. `N(0, sigma_noise²)` samples in row-major order.
pub fn add_noise(img: &LumaImage, spec: &DegradeSpec) -> Result<LumaImage> {
    spec.validate()?;
    if spec.sigma_noise == 0.0 {
        return Ok(img.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let data = img
        .data()
        .iter()
        .map(|&s| {
            let z: f64 = StandardNormal.sample(&mut rng);
            clamp_unit(s + spec.sigma_noise * z)
        })
        .collect();
    LumaImage::new(img.width(), img.height(), data)
}

/// Blur followed by noise.
pub fn degrade(img: &LumaImage, spec: &DegradeSpec) -> Result<LumaImage> {
    add_noise(&gaussian_blur(img, spec)?, spec)
}

/// Unclamped `img + γ·(img − blur(img))`.
pub fn unsharp_mask_raw(img: &LumaImage, spec: &SharpenSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let k = gaussian_kernel(spec.kernel_size(), spec.radius_sigma)?;
    let blurred = convolve_separable(img, &k)?;
    Ok(img
        .data()
        .iter()
        .zip(&blurred)
        .map(|(&s, &b)| s + spec.gamma * (s - b))
        .collect())
}

pub fn unsharp_mask(img: &LumaImage, spec: &SharpenSpec) -> Result<LumaImage> {
    if spec.gamma == 0.0 {
        spec.validate()?;
        return Ok(img.clone());
    }
    let raw = unsharp_mask_raw(img, spec)?;
    LumaImage::from_clamped(img.width(), img.height(), raw)
}
