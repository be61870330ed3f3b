mod common;

use common::natural_crops;
use qomega_core::sharpness::DEFAULT_TAU;
use qomega_core::{compute_q, gamma_sweep, unsharp_mask, SharpenSpec, SweepConfig};

#[test]
fn sweep_trends_hold_on_every_bundled_image() {
    let gammas = [0.8, 1.3, 2.5, 11.8, 13.8];
    for (name, img) in natural_crops() {
        let rows = gamma_sweep(&img, &gammas, &SweepConfig::default()).unwrap();
        assert!(rows.windows(2).all(|w| w[1].q > w[0].q), "{name}: Q");
        assert!(rows.windows(2).all(|w| w[1].psnr < w[0].psnr), "{name}: PSNR");
    }
}

#[test]
fn sharpening_raises_q_on_every_bundled_image() {
    for (name, img) in natural_crops() {
        let q0 = compute_q(&img, 8, DEFAULT_TAU).unwrap().q;
        for gamma in [0.3, 0.8] {
            let sharp = unsharp_mask(
                &img,
                &SharpenSpec {
                    gamma,
                    radius_sigma: 1.0,
                },
            )
            .unwrap();
            let q1 = compute_q(&sharp, 8, DEFAULT_TAU).unwrap().q;
            assert!(q1 > q0, "{name} gamma {gamma}: {q0} -> {q1}");
        }
    }
}

#[test]
fn bundled_crops_are_128_square() {
    let crops = natural_crops();
    assert!(crops.len() >= 10);
    assert!(crops.iter().all(|(_, img)| img.dims() == (128, 128)));
}
