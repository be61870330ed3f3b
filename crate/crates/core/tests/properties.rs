mod common;

use common::{random_image, Lcg};
use proptest::prelude::*;
use qomega_core::omega::weight;
use qomega_core::sharpness::{PatchSpectrum, StructureTensor, DEFAULT_TAU};
use qomega_core::{
    composite_loss, compute_omega, compute_q, freq_loss, gaussian_blur, gradient_field, l1_loss, mse, paired_t_test,
    psnr, ssim, unsharp_mask, BaseLoss, DegradeSpec, LossParams, LumaImage, OmegaParams, SharpenSpec,
};

fn image(seed: u64, w: usize, h: usize) -> LumaImage {
    random_image(&mut Lcg::new(seed), w, h)
}

/// Piecewise-constant blocks plus a faint ramp: a mix of flat, edge-like
/// and textured patches.
fn blocky(seed: u64, w: usize, h: usize) -> LumaImage {
    let mut rng = Lcg::new(seed);
    let cells = random_image(&mut rng, w / 6 + 1, h / 6 + 1);
    LumaImage::from_fn(w, h, |x, y| 0.8 * cells.get(x / 6, y / 6) + 0.001 * x as f64).unwrap()
}

fn total_variation(img: &LumaImage) -> f64 {
    let (w, h) = img.dims();
    let mut tv = 0.0;
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                tv += (img.get(x + 1, y) - img.get(x, y)).abs();
            }
            if y + 1 < h {
                tv += (img.get(x, y + 1) - img.get(x, y)).abs();
            }
        }
    }
    tv
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_bounds(seed in any::<u64>(), scale in 1e-6f64..1.0) {
        let img = image(seed, 8, 8).scaled(scale).unwrap();
        let field = gradient_field(&img).unwrap();
        let s = StructureTensor::from_gradients(field.gx(), field.gy()).spectrum();
        prop_assert!(s.s1 >= s.s2 && s.s2 >= 0.0);
        prop_assert!((0.0..=1.0).contains(&s.coherence));
        prop_assert!(s.q_patch <= s.s1);
    }

    #[test]
    fn singular_value_spectrum_bounds(a in 0.0f64..10.0, b in 0.0f64..10.0) {
        let s = PatchSpectrum::from_singular_values(a.max(b), a.min(b));
        prop_assert!((0.0..=1.0).contains(&s.coherence));
        prop_assert!(s.q_patch >= 0.0 && s.q_patch <= s.s1);
    }

    #[test]
    fn omega_is_a_convex_blend(seed in any::<u64>(), gamma in 0.0f64..5.0) {
        let a = blocky(seed, 48, 32);
        let b = unsharp_mask(&a, &SharpenSpec { gamma, radius_sigma: 1.0 }).unwrap();
        let r = compute_omega(&a, &b, &OmegaParams::default()).unwrap();
        for p in &r.per_patch {
            let lo = p.p_prime.min(p.q_rest);
            let hi = p.p_prime.max(p.q_rest);
            prop_assert!(p.omega >= lo - 1e-12 && p.omega <= hi + 1e-12);
            prop_assert!((0.0..=1.0).contains(&p.sigma));
            prop_assert!(p.p_prime <= 50.0);
        }
    }

    #[test]
    fn sigmoid_is_symmetric_about_its_midpoint(d in -3.0f64..3.0, r in 0.5f64..20.0, a0 in 0.1f64..3.0) {
        let params = OmegaParams { steepness: r, alpha0: a0, ..OmegaParams::default() };
        prop_assert!((weight(a0 + d, &params) + weight(a0 - d, &params) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_scales_with_contrast(seed in any::<u64>(), c in 0.05f64..1.0) {
        let img = blocky(seed, 64, 64);
        let base = compute_q(&img, 8, DEFAULT_TAU).unwrap();
        let scaled = compute_q(&img.scaled(c).unwrap(), 8, DEFAULT_TAU).unwrap();
        prop_assert_eq!(base.selected_count, scaled.selected_count);
        prop_assert!((scaled.q - c * base.q).abs() <= 1e-9 * base.q.max(1.0));
    }

    #[test]
    fn q_is_rotation_invariant(seed in any::<u64>()) {
        let img = blocky(seed, 64, 64);
        let q0 = compute_q(&img, 8, DEFAULT_TAU).unwrap();
        let q1 = compute_q(&img.rotate90(), 8, DEFAULT_TAU).unwrap();
        prop_assert_eq!(q0.selected_count, q1.selected_count);
        prop_assert!((q0.q - q1.q).abs() < 1e-9);
    }

    #[test]
    fn l1_triangle_inequality(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (image(s1, 16, 12), image(s2, 16, 12), image(s3, 16, 12));
        let ab = l1_loss(&a, &b).unwrap();
        let bc = l1_loss(&b, &c).unwrap();
        let ac = l1_loss(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn full_reference_metrics_are_symmetric(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (image(s1, 24, 16), image(s2, 24, 16));
        prop_assert_eq!(mse(&a, &b).unwrap(), mse(&b, &a).unwrap());
        prop_assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
        prop_assert_eq!(l1_loss(&a, &b).unwrap(), l1_loss(&b, &a).unwrap());
        prop_assert!((ssim(&a, &b).unwrap() - ssim(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!((freq_loss(&a, &b).unwrap() - freq_loss(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn t_test_p_is_shift_invariant(seed in any::<u64>(), n in 3usize..30, shift in -100.0f64..100.0) {
        let mut rng = Lcg::new(seed);
        let xs: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let xs2: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let ys2: Vec<f64> = ys.iter().map(|y| y + shift).collect();
        let p = paired_t_test(&xs, &ys).unwrap().p_value;
        let p2 = paired_t_test(&xs2, &ys2).unwrap().p_value;
        prop_assert!((p - p2).abs() < 1e-9);
    }

    #[test]
    fn t_test_is_antisymmetric(seed in any::<u64>(), n in 2usize..30) {
        let mut rng = Lcg::new(seed);
        let xs: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let f = paired_t_test(&xs, &ys).unwrap();
        let b = paired_t_test(&ys, &xs).unwrap();
        prop_assert_eq!(f.t_statistic, -b.t_statistic);
        prop_assert_eq!(f.p_value, b.p_value);
        prop_assert!((0.0..=1.0).contains(&f.p_value));
        prop_assert_eq!(f.significant_at_5pct, f.p_value < 0.05);
    }

    #[test]
    fn blur_does_not_increase_total_variation(seed in any::<u64>(), sigma in 0.3f64..4.0) {
        let img = image(seed, 32, 24);
        let blurred = gaussian_blur(&img, &DegradeSpec { kernel_size: 9, sigma_blur: sigma, ..DegradeSpec::default() }).unwrap();
        prop_assert!(total_variation(&blurred) <= total_variation(&img) + 1e-9);
    }

    #[test]
    fn psnr_falls_as_the_error_grows(seed in any::<u64>(), d1 in 0.001f64..0.3, extra in 0.001f64..0.3) {
        let a = image(seed, 16, 16).scaled(0.3).unwrap();
        let near = LumaImage::new(16, 16, a.data().iter().map(|v| v + d1).collect()).unwrap();
        let far = LumaImage::new(16, 16, a.data().iter().map(|v| v + d1 + extra).collect()).unwrap();
        prop_assert!(mse(&a, &near).unwrap() < mse(&a, &far).unwrap());
        prop_assert!(psnr(&a, &near).unwrap() > psnr(&a, &far).unwrap());
    }

    #[test]
    fn freq_loss_detects_any_single_change(seed in any::<u64>(), idx in 0usize..96, d in 1e-6f64..0.5) {
        let a = image(seed, 12, 8).scaled(0.5).unwrap();
        let mut data = a.data().to_vec();
        data[idx] += d;
        let b = LumaImage::new(12, 8, data).unwrap();
        prop_assert!(freq_loss(&a, &b).unwrap() > 0.0);
        prop_assert_eq!(freq_loss(&b, &b).unwrap(), 0.0);
    }

    #[test]
    fn ssim_against_the_negative(seed in any::<u64>()) {
        let a = image(seed, 24, 24);
        let neg = LumaImage::new(24, 24, a.data().iter().map(|v| 1.0 - v).collect()).unwrap();
        let s = ssim(&a, &neg).unwrap();
        prop_assert!(s < 1.0);
        prop_assert!((s - ssim(&neg, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sharpening_lowers_the_sharpness_term(seed in any::<u64>(), gamma in 0.2f64..1.5) {
        let gt = blocky(seed, 64, 64);
        let sharp = unsharp_mask(&gt, &SharpenSpec { gamma, radius_sigma: 1.0 }).unwrap();
        let params = LossParams::default();
        let term = |r: &LumaImage| composite_loss(&gt, r, BaseLoss::L1, &params).unwrap() - l1_loss(&gt, r).unwrap();
        prop_assert!(term(&sharp) < term(&gt));
    }
}
