//! No-reference sharpness metric Q.
//!
//! Each `k`×`k` patch is summarized by the singular values `s1 ≥ s2` of its
//! stacked gradient matrix `G` (`k²` rows of `(gx, gy)`), obtained from the
//! 2×2 structure tensor `GᵀG`. Patches whose gradient coherence
//! `(s1 - s2) / (s1 + s2)` exceeds a noise-calibrated threshold are treated
//! as anisotropic and contribute `s1 · coherence` to the image score.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::image::{tile, LumaImage, Patch};

/// Guard added to `s1 + s2` so the all-zero patch has coherence 0.
pub const EPS: f64 = 1e-12;

/// Default patch size for stand-alone Q.
pub const DEFAULT_PATCH_SIZE: usize = 8;

/// Default false-alarm rate of the anisotropy test.
pub const DEFAULT_DELTA: f64 = 0.001;

/// Default Monte-Carlo trial count and seed for threshold calibration.
pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 7;

/// `calibrate_threshold(8, 0.001, 100_000, 7)`, frozen.
pub const DEFAULT_TAU: f64 = 0.273_966_565_892_806_16;

/// Per-pixel image gradients by central differences (one-sided at borders).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    gx: Vec<f64>,
    gy: Vec<f64>,
}

impl GradientField {
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn gx(&self) -> &[f64] {
        &self.gx
    }

    pub fn gy(&self) -> &[f64] {
        &self.gy
    }

    /// Structure tensor accumulated over the `k`×`k` window at `(x0, y0)`.
    pub fn window_tensor(&self, x0: usize, y0: usize, k: usize) -> StructureTensor {
        let mut t = StructureTensor::default();
        for y in y0..y0 + k {
            let base = y * self.width;
            let gx = &self.gx[base + x0..base + x0 + k];
            let gy = &self.gy[base + x0..base + x0 + k];
            for (&dx, &dy) in gx.iter().zip(gy) {
                t.push(dx, dy);
            }
        }
        t
    }
}

#[inline]
fn diff(prev: f64, cur: f64, next: f64, i: usize, n: usize) -> f64 {
    if i == 0 {
        next - cur
    } else if i + 1 == n {
        cur - prev
    } else {
        (next - prev) * 0.5
    }
}

/// Central-difference gradient of a `w`×`h` grid read through `at`.
#[inline]
fn gradient_at(at: impl Fn(usize, usize) -> f64, w: usize, h: usize, x: usize, y: usize) -> (f64, f64) {
    let cur = at(x, y);
    let gx = diff(
        if x > 0 { at(x - 1, y) } else { cur },
        cur,
        if x + 1 < w { at(x + 1, y) } else { cur },
        x,
        w,
    );
    let gy = diff(
        if y > 0 { at(x, y - 1) } else { cur },
        cur,
        if y + 1 < h { at(x, y + 1) } else { cur },
        y,
        h,
    );
    (gx, gy)
}

/// Computes `(gx, gy)` over the whole image.
pub fn gradient_field(img: &LumaImage) -> Result<GradientField> {
    let (w, h) = img.dims();
    if w < 2 || h < 2 {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            min_width: 2,
            min_height: 2,
        });
    }
    let mut gx = Vec::with_capacity(w * h);
    let mut gy = Vec::with_capacity(w * h);
    for y in 0..h {
        let row = img.row(y);
        let up = img.row(y.saturating_sub(1));
        let down = img.row((y + 1).min(h - 1));
        for x in 0..w {
            gx.push(diff(row[x.saturating_sub(1)], row[x], row[(x + 1).min(w - 1)], x, w));
            gy.push(diff(up[x], row[x], down[x], y, h));
        }
    }
    Ok(GradientField {
        width: w,
        height: h,
        gx,
        gy,
    })
}

/// Entries of `GᵀG`: `a = Σgx²`, `b = Σgx·gy`, `c = Σgy²`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StructureTensor {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl StructureTensor {
    #[inline]
    pub fn push(&mut self, gx: f64, gy: f64) {
        self.a += gx * gx;
        self.b += gx * gy;
        self.c += gy * gy;
    }

    pub fn from_gradients(gx: &[f64], gy: &[f64]) -> Self {
        let mut t = StructureTensor::default();
        for (&dx, &dy) in gx.iter().zip(gy) {
            t.push(dx, dy);
        }
        t
    }

    /// Tensor of a patch treated as a stand-alone image: gradients use only
    /// samples inside the patch, one-sided at its border.
    pub fn of_patch(patch: &Patch<'_>) -> Self {
        let k = patch.size();
        let mut t = StructureTensor::default();
        for y in 0..k {
            for x in 0..k {
                let (gx, gy) = gradient_at(|u, v| patch.get(u, v), k, k, x, y);
                t.push(gx, gy);
            }
        }
        t
    }

    /// Eigenvalues `(λ+, λ-)` of the tensor, `λ-` clamped at zero.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let StructureTensor { a, b, c } = *self;
        let tr = a + c;
        let disc = libm::sqrt((a - c) * (a - c) + 4.0 * b * b);
        let hi = 0.5 * (tr + disc);
        // det / λ+ avoids cancellation in (tr - disc) / 2
        let lo = if hi > 0.0 { (a * c - b * b) / hi } else { 0.0 };
        (hi, lo.max(0.0).min(hi))
    }

    pub fn spectrum(&self) -> PatchSpectrum {
        let (hi, lo) = self.eigenvalues();
        PatchSpectrum::from_singular_values(libm::sqrt(hi), libm::sqrt(lo))
    }
}

/// Singular-value summary of one patch's gradient matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchSpectrum {
    pub s1: f64,
    pub s2: f64,
    pub coherence: f64,
    pub q_patch: f64,
}

impl PatchSpectrum {
    pub fn from_singular_values(s1: f64, s2: f64) -> Self {
        let coherence = ((s1 - s2) / (s1 + s2 + EPS)).clamp(0.0, 1.0);
        PatchSpectrum {
            s1,
            s2,
            coherence,
            q_patch: s1 * coherence,
        }
    }
}

/// Spectrum of the `k`×`k` window of `field` at `(x0, y0)`.
pub fn patch_spectrum(field: &GradientField, x0: usize, y0: usize, k: usize) -> PatchSpectrum {
    field.window_tensor(x0, y0, k).spectrum()
}

/// Coherence threshold for which pure Gaussian noise patches are flagged
/// anisotropic with probability `delta`.
///
/// Each trial draws a `(k+2)`×`(k+2)` i.i.d. standard normal field,
/// differentiates it and takes the coherence of the inner `k`×`k` window, so
/// every trial gradient is a central difference as in an interior image patch.
/// The threshold is the nearest-rank `(1 - delta)` quantile.
pub fn calibrate_threshold(k: usize, delta: f64, trials: usize, seed: u64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", "must lie in (0, 1)"));
    }
    if k < 2 {
        return Err(Error::param("k", "must be at least 2"));
    }
    if trials < 1000 {
        return Err(Error::SampleSize {
            required: 1000,
            got: trials,
        });
    }
    let n = k + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = alloc::vec![0.0f64; n * n];
    let mut coherences = Vec::with_capacity(trials);
    for _ in 0..trials {
        for v in field.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let mut t = StructureTensor::default();
        for y in 1..=k {
            for x in 1..=k {
                let gx = 0.5 * (field[y * n + x + 1] - field[y * n + x - 1]);
                let gy = 0.5 * (field[(y + 1) * n + x] - field[(y - 1) * n + x]);
                t.push(gx, gy);
            }
        }
        coherences.push(t.spectrum().coherence);
    }
    coherences.sort_unstable_by(f64::total_cmp);
    let rank = libm::ceil((1.0 - delta) * trials as f64) as usize;
    Ok(coherences[rank.clamp(1, trials) - 1])
}

/// Patch size and coherence threshold for [`compute_q`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParams {
    pub patch_size: usize,
    pub tau: f64,
}

impl Default for QParams {
    fn default() -> Self {
        QParams {
            patch_size: DEFAULT_PATCH_SIZE,
            tau: DEFAULT_TAU,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchQ {
    pub row: usize,
    pub col: usize,
    pub spectrum: PatchSpectrum,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QResult {
    pub q: f64,
    pub selected_count: usize,
    pub total_count: usize,
    pub patch_size: usize,
    pub per_patch: Vec<PatchQ>,
}

impl QResult {
    /// Aggregates row-major patch records. Summation runs in slice order, so
    /// any driver that preserves the order reproduces the sequential result.
    pub fn from_patches(patch_size: usize, per_patch: Vec<PatchQ>) -> Self {
        let mut sum = 0.0;
        let mut selected_count = 0;
        for p in per_patch.iter().filter(|p| p.selected) {
            sum += p.spectrum.q_patch;
            selected_count += 1;
        }
        let q = if selected_count == 0 {
            0.0
        } else {
            sum / selected_count as f64
        };
        QResult {
            q,
            selected_count,
            total_count: per_patch.len(),
            patch_size,
            per_patch,
        }
    }
}

/// Evaluates patch `index` of the `k`-tiling of `field`.
pub fn q_patch_at(field: &GradientField, k: usize, cols: usize, index: usize, tau: f64) -> PatchQ {
    let (row, col) = (index / cols, index % cols);
    let spectrum = patch_spectrum(field, col * k, row * k, k);
    PatchQ {
        row,
        col,
        spectrum,
        selected: spectrum.coherence > tau,
    }
}

/// Image-level Q: mean `q_patch` over patches with coherence above `tau`.
pub fn compute_q(img: &LumaImage, k: usize, tau: f64) -> Result<QResult> {
    let grid = tile(img, k)?;
    let field = gradient_field(img)?;
    let per_patch = (0..grid.len())
        .map(|i| q_patch_at(&field, k, grid.cols(), i, tau))
        .collect();
    Ok(QResult::from_patches(k, per_patch))
}
