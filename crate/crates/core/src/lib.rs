//! Sharpness and ringing-aware image quality metrics.
//!
//! Everything here operates on [`LumaImage`], a single-channel buffer with
//! samples in `[0, 1]`:
//!
//! * [`sharpness`]: the no-reference metric Q built from per-patch gradient
//!   singular values and an anisotropy test.
//! * [`omega`]: the full-reference metric Ω, a per-patch sigmoid blend of
//!   clipped PSNR and restored-patch sharpness.
//! * [`reference`]: MSE, PSNR, SSIM and the ℓ1 / frequency / composite losses.
//! * [`synth`]: Gaussian blur, additive noise and unsharp masking.
//! * [`stats`] and [`sweep`]: summaries, paired t-tests and sharpening sweeps.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, parallel
//! drivers and the command-line tool live in the `qomega` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod fft;
pub mod image;
pub mod omega;
pub mod reference;
pub mod sharpness;
pub mod stats;
pub mod sweep;
pub mod synth;

pub use error::{Error, Result};
pub use image::{tile, LumaImage, Patch, PatchGrid};
pub use omega::{compute_omega, OmegaParams, OmegaResult, PatchOmega};
pub use reference::{composite_loss, freq_loss, l1_loss, mse, psnr, ssim, BaseLoss, LossParams};
pub use sharpness::{calibrate_threshold, compute_q, gradient_field, PatchSpectrum, QParams, QResult};
pub use stats::{paired_t_test, Summary, TTestResult};
pub use sweep::{gamma_sweep, SweepConfig, SweepRow};
pub use synth::{add_noise, degrade, gaussian_blur, unsharp_mask, DegradeSpec, SharpenSpec};
