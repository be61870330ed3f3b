//! Thread-pool drivers for the per-patch metrics.
//!
//! Patches are evaluated concurrently but gathered in row-major order and
//! reduced sequentially by the core aggregation routines, so results are
//! bit-identical to the single-threaded functions for any thread count.

use qomega_core::omega::{omega_grid, omega_patch_at};
use qomega_core::sharpness::{gradient_field, q_patch_at};
use qomega_core::{tile, LumaImage, OmegaParams, OmegaResult, QResult, Result};
use rayon::prelude::*;
use rayon::ThreadPool;

/// Builds a pool with `threads` workers; `None` or `Some(0)` uses rayon's default.
pub fn thread_pool(threads: Option<usize>) -> ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads.filter(|&n| n > 0) {
        builder = builder.num_threads(n);
    }
    builder.build().expect("failed to start worker threads")
}

pub fn par_compute_q(pool: &ThreadPool, img: &LumaImage, k: usize, tau: f64) -> Result<QResult> {
    let grid = tile(img, k)?;
    let field = gradient_field(img)?;
    let per_patch = pool.install(|| {
        (0..grid.len())
            .into_par_iter()
            .map(|i| q_patch_at(&field, k, grid.cols(), i, tau))
            .collect()
    });
    Ok(QResult::from_patches(k, per_patch))
}

pub fn par_compute_omega(
    pool: &ThreadPool,
    reference: &LumaImage,
    restored: &LumaImage,
    params: &OmegaParams,
) -> Result<OmegaResult> {
    let grid = omega_grid(reference, restored, params)?;
    let per_patch = pool.install(|| {
        (0..grid.len())
            .into_par_iter()
            .map(|i| omega_patch_at(reference, restored, &grid, i, params))
            .collect()
    });
    Ok(OmegaResult::from_patches(*params, per_patch))
}
