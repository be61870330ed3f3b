//! Normalized single-channel images and non-overlapping patch tiling.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// BT.601 luma weights for R, G and B.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// A row-major luma image with samples in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LumaImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl LumaImage {
    /// Builds an image, validating the buffer length and sample range.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::TooSmall {
                width,
                height,
                min_width: 1,
                min_height: 1,
            });
        }
        if data.len() != width * height {
            return Err(Error::BufferLength {
                width,
                height,
                len: data.len(),
            });
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::SampleRange { index, value });
        }
        Ok(LumaImage { width, height, data })
    }

    /// Builds an image from arbitrary reals, clamping each sample into `[0, 1]`.
    /// NaN maps to 0.
    pub fn from_clamped(width: usize, height: usize, mut data: Vec<f64>) -> Result<Self> {
        for v in data.iter_mut() {
            *v = clamp_unit(*v);
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, alloc::vec![value; width * height])
    }

    /// Samples `f(x, y)` on the grid; results are clamped into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::from_clamped(width, height, data)
    }

    /// Converts 8-bit grayscale codes.
    pub fn from_gray8(width: usize, height: usize, codes: &[u8]) -> Result<Self> {
        let data = codes.iter().map(|&c| f64::from(c) / 255.0).collect();
        Self::new(width, height, data)
    }

    /// Converts interleaved 8-bit RGB codes to luma.
    pub fn from_rgb8(width: usize, height: usize, codes: &[u8]) -> Result<Self> {
        if codes.len() != 3 * width * height {
            return Err(Error::BufferLength {
                width,
                height,
                len: codes.len() / 3,
            });
        }
        let [wr, wg, wb] = LUMA_WEIGHTS;
        let data = codes
            .chunks_exact(3)
            .map(|px| {
                let y = wr * f64::from(px[0]) + wg * f64::from(px[1]) + wb * f64::from(px[2]);
                clamp_unit(y / 255.0)
            })
            .collect();
        Self::new(width, height, data)
    }

    /// Quantizes to 8-bit codes with clamping and round-half-up.
    pub fn to_gray8(&self) -> Vec<u8> {
        self.data.iter().map(|&s| quantize(s)).collect()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Copies out the `w`×`h` region whose top-left corner is `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<LumaImage> {
        if x0 + w > self.width || y0 + h > self.height {
            return Err(Error::TooSmall {
                width: self.width,
                height: self.height,
                min_width: x0 + w,
                min_height: y0 + h,
            });
        }
        let mut data = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            data.extend_from_slice(&self.row(y)[x0..x0 + w]);
        }
        LumaImage::new(w, h, data)
    }

    /// Rotates by 90 degrees counter-clockwise.
    pub fn rotate90(&self) -> LumaImage {
        let (w, h) = self.dims();
        let mut data = Vec::with_capacity(w * h);
        for ny in 0..w {
            for nx in 0..h {
                data.push(self.get(w - 1 - ny, nx));
            }
        }
        LumaImage {
            width: h,
            height: w,
            data,
        }
    }

    /// Multiplies every sample by `factor`, which must lie in `[0, 1]`.
    pub fn scaled(&self, factor: f64) -> Result<LumaImage> {
        if !(0.0..=1.0).contains(&factor) {
            return Err(Error::param("factor", "must lie in [0, 1]"));
        }
        Ok(LumaImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|s| s * factor).collect(),
        })
    }

    pub fn patch(&self, x0: usize, y0: usize, size: usize) -> Patch<'_> {
        debug_assert!(x0 + size <= self.width && y0 + size <= self.height);
        Patch {
            img: self,
            x0,
            y0,
            size,
        }
    }

    /// The whole image as a single square patch, if it is square.
    pub fn as_patch(&self) -> Option<Patch<'_>> {
        (self.width == self.height).then(|| self.patch(0, 0, self.width))
    }

    pub(crate) fn check_same_dims(&self, other: &LumaImage) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::mismatch(self.dims(), other.dims()));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

#[inline]
fn quantize(s: f64) -> u8 {
    // floor(x + 0.5) is round-half-up for non-negative x
    libm::floor(clamp_unit(s) * 255.0 + 0.5) as u8
}

/// A square view into a [`LumaImage`].
#[derive(Debug, Clone, Copy)]
pub struct Patch<'a> {
    img: &'a LumaImage,
    x0: usize,
    y0: usize,
    size: usize,
}

impl<'a> Patch<'a> {
    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn origin(&self) -> (usize, usize) {
        (self.x0, self.y0)
    }

    /// Sample at patch-local coordinates.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.img.get(self.x0 + x, self.y0 + y)
    }

    #[inline]
    pub fn row(&self, y: usize) -> &'a [f64] {
        &self.img.row(self.y0 + y)[self.x0..self.x0 + self.size]
    }

    pub fn to_image(&self) -> LumaImage {
        let mut data = Vec::with_capacity(self.size * self.size);
        for y in 0..self.size {
            data.extend_from_slice(self.row(y));
        }
        LumaImage {
            width: self.size,
            height: self.size,
            data,
        }
    }
}

/// Non-overlapping square tiling of the top-left floor-multiple region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchGrid {
    patch_size: usize,
    rows: usize,
    cols: usize,
}

impl PatchGrid {
    pub fn new(width: usize, height: usize, patch_size: usize) -> Result<Self> {
        if patch_size < 2 {
            return Err(Error::param("patch_size", "must be at least 2"));
        }
        let (rows, cols) = (height / patch_size, width / patch_size);
        if rows == 0 || cols == 0 {
            return Err(Error::TooSmall {
                width,
                height,
                min_width: patch_size,
                min_height: patch_size,
            });
        }
        Ok(PatchGrid { patch_size, rows, cols })
    }

    #[inline]
    pub fn patch_size(&self) -> usize {
        self.patch_size
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (row, col) of the patch at row-major index `i`.
    #[inline]
    pub fn position(&self, i: usize) -> (usize, usize) {
        (i / self.cols, i % self.cols)
    }

    /// Top-left pixel of the patch at row-major index `i`.
    #[inline]
    pub fn origin(&self, i: usize) -> (usize, usize) {
        let (r, c) = self.position(i);
        (c * self.patch_size, r * self.patch_size)
    }

    pub fn origins(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).map(move |i| self.origin(i))
    }
}

/// Tiles `img` into non-overlapping `patch_size`×`patch_size` patches.
pub fn tile(img: &LumaImage, patch_size: usize) -> Result<PatchGrid> {
    PatchGrid::new(img.width(), img.height(), patch_size)
}
