//! Ringing-aware full-reference metric Ω.
//!
//! Per `m`×`m` patch, the clipped PSNR `P′` and the restored patch's
//! sharpness `Q̃` are blended as `ω = (1 − σ(α))·P′ + σ(α)·Q̃`, where `α` is the
//! relative change in sharpness against the reference patch and `σ` is a
//! falling sigmoid. Small `α` (faithful sharpening) keeps weight on `Q̃`;
//! large `α` (ringing) shifts weight onto PSNR. The image score is the mean
//! over patches.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::{tile, LumaImage, Patch, PatchGrid};
use crate::sharpness::{StructureTensor, EPS};
use crate::stats::compensated_sum;

pub const PSNR_CAP: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaParams {
    /// Sigmoid steepness `R`.
    pub steepness: f64,
    /// Sigmoid midpoint `α₀`.
    pub alpha0: f64,
    pub patch_size: usize,
    /// `α` assigned when the reference patch is flat but the restored one is not.
    pub alpha_cap: f64,
}

impl Default for OmegaParams {
    fn default() -> Self {
        OmegaParams {
            steepness: 5.0,
            alpha0: 1.2,
            patch_size: 16,
            alpha_cap: 10.0,
        }
    }
}

impl OmegaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.steepness > 0.0) {
            return Err(Error::param("steepness", "must be positive"));
        }
        if !(self.alpha0 > 0.0) {
            return Err(Error::param("alpha0", "must be positive"));
        }
        if self.patch_size < 2 {
            return Err(Error::param("patch_size", "must be at least 2"));
        }
        if !(self.alpha_cap >= 0.0) {
            return Err(Error::param("alpha_cap", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchOmega {
    pub row: usize,
    pub col: usize,
    pub q_ref: f64,
    pub q_rest: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub p_prime: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaResult {
    pub omega: f64,
    pub per_patch: Vec<PatchOmega>,
    pub params: OmegaParams,
}

impl OmegaResult {
    /// Averages row-major patch records in slice order.
    pub fn from_patches(params: OmegaParams, per_patch: Vec<PatchOmega>) -> Self {
        let sum: f64 = per_patch.iter().fold(0.0, |acc, p| acc + p.omega);
        OmegaResult {
            omega: sum / per_patch.len() as f64,
            per_patch,
            params,
        }
    }
}

/// Sharpness of a whole patch, with no anisotropy selection.
pub fn patch_q(patch: &Patch<'_>) -> f64 {
    StructureTensor::of_patch(patch).spectrum().q_patch
}

/// Relative sharpness deviation `|q_rest − q_ref| / q_ref`.
///
/// A flat reference patch gives 0 when the restored patch is flat too and
/// `alpha_cap` otherwise.
pub fn deviation_ratio(q_ref: f64, q_rest: f64, alpha_cap: f64) -> f64 {
    if q_ref < EPS {
        if q_rest < EPS {
            0.0
        } else {
            alpha_cap
        }
    } else {
        libm::fabs(q_rest - q_ref) / q_ref
    }
}

/// `σ(α) = 1 / (1 + exp(R·(α − α₀)))`.
pub fn weight(alpha: f64, params: &OmegaParams) -> f64 {
    // exp saturates to +inf (σ → 0) or 0 (σ → 1)
    1.0 / (1.0 + libm::exp(params.steepness * (alpha - params.alpha0)))
}

fn patch_mse(p: &Patch<'_>, q: &Patch<'_>) -> f64 {
    let sq = (0..p.size()).flat_map(|y| p.row(y).iter().zip(q.row(y)).map(|(a, b)| (a - b) * (a - b)));
    compensated_sum(sq) / (p.size() * p.size()) as f64
}

/// PSNR of two patches (peak 1.0), capped at [`PSNR_CAP`].
pub fn clipped_psnr(p: &Patch<'_>, q: &Patch<'_>) -> Result<f64> {
    if p.size() != q.size() {
        return Err(Error::mismatch((p.size(), p.size()), (q.size(), q.size())));
    }
    Ok(cap_psnr(patch_mse(p, q)))
}

#[inline]
fn cap_psnr(mse: f64) -> f64 {
    if mse <= 0.0 {
        PSNR_CAP
    } else {
        (-10.0 * libm::log10(mse)).min(PSNR_CAP)
    }
}

/// Evaluates patch `index` of `grid` over an aligned reference/restored pair.
pub fn omega_patch_at(
    reference: &LumaImage,
    restored: &LumaImage,
    grid: &PatchGrid,
    index: usize,
    params: &OmegaParams,
) -> PatchOmega {
    let m = grid.patch_size();
    let (row, col) = grid.position(index);
    let (x0, y0) = grid.origin(index);
    let p = reference.patch(x0, y0, m);
    let r = restored.patch(x0, y0, m);
    let q_ref = patch_q(&p);
    let q_rest = patch_q(&r);
    let alpha = deviation_ratio(q_ref, q_rest, params.alpha_cap);
    let sigma = weight(alpha, params);
    let p_prime = cap_psnr(patch_mse(&p, &r));
    PatchOmega {
        row,
        col,
        q_ref,
        q_rest,
        alpha,
        sigma,
        p_prime,
        omega: (1.0 - sigma) * p_prime + sigma * q_rest,
    }
}

/// Shared precondition checks; returns the common tiling.
pub fn omega_grid(reference: &LumaImage, restored: &LumaImage, params: &OmegaParams) -> Result<PatchGrid> {
    params.validate()?;
    reference.check_same_dims(restored)?;
    tile(reference, params.patch_size)
}

pub fn compute_omega(reference: &LumaImage, restored: &LumaImage, params: &OmegaParams) -> Result<OmegaResult> {
    let grid = omega_grid(reference, restored, params)?;
    let per_patch = (0..grid.len())
        .map(|i| omega_patch_at(reference, restored, &grid, i, params))
        .collect();
    Ok(OmegaResult::from_patches(*params, per_patch))
}
