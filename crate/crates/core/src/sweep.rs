//! Sharpening sweeps: how Q, PSNR and Ω respond to increasing unsharp-mask
//! strength on a single image.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::LumaImage;
use crate::omega::{compute_omega, OmegaParams};
use crate::reference::psnr;
use crate::sharpness::{compute_q, QParams};
use crate::synth::{unsharp_mask, SharpenSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub radius_sigma: f64,
    pub q: QParams,
    pub omega: OmegaParams,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            radius_sigma: 1.0,
            q: QParams::default(),
            omega: OmegaParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    /// Q of the sharpened image.
    pub q: f64,
    /// PSNR of the sharpened image against the original.
    pub psnr: f64,
    /// Ω of the sharpened image against the original.
    pub omega: f64,
    /// Mean per-patch deviation ratio inside Ω.
    pub mean_alpha: f64,
}

/// Evaluates one sweep point.
pub fn sweep_point(img: &LumaImage, gamma: f64, config: &SweepConfig) -> Result<SweepRow> {
    let sharp = unsharp_mask(
        img,
        &SharpenSpec {
            gamma,
            radius_sigma: config.radius_sigma,
        },
    )?;
    let q = compute_q(&sharp, config.q.patch_size, config.q.tau)?.q;
    let omega = compute_omega(img, &sharp, &config.omega)?;
    let mean_alpha = omega.per_patch.iter().map(|p| p.alpha).sum::<f64>() / omega.per_patch.len() as f64;
    Ok(SweepRow {
        gamma,
        q,
        psnr: psnr(img, &sharp)?,
        omega: omega.omega,
        mean_alpha,
    })
}

/// Checks that `gammas` is non-empty and sorted ascending.
pub fn check_gammas(gammas: &[f64]) -> Result<()> {
    if gammas.is_empty() {
        return Err(Error::param("gammas", "must not be empty"));
    }
    if gammas.iter().any(|g| !(*g >= 0.0)) {
        return Err(Error::param("gammas", "must be non-negative"));
    }
    if gammas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("gammas", "must be sorted ascending"));
    }
    Ok(())
}

pub fn gamma_sweep(img: &LumaImage, gammas: &[f64], config: &SweepConfig) -> Result<Vec<SweepRow>> {
    check_gammas(gammas)?;
    gammas.iter().map(|&g| sweep_point(img, g, config)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gamma_is_the_no_op_row() {
        let img = LumaImage::from_fn(32, 32, |x, y| 0.5 + 0.25 * libm::sin((x * y) as f64 * 0.1)).unwrap();
        let rows = gamma_sweep(&img, &[0.0], &SweepConfig::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].psnr, f64::INFINITY);
        assert_eq!(rows[0].mean_alpha, 0.0);
    }

    #[test]
    fn unsorted_or_empty_gammas_are_rejected() {
        let img = LumaImage::filled(32, 32, 0.5).unwrap();
        let c = SweepConfig::default();
        assert!(gamma_sweep(&img, &[], &c).is_err());
        assert!(gamma_sweep(&img, &[1.0, 0.5], &c).is_err());
    }
}
