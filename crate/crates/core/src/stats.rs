//! Summary statistics and the two-sided paired Student t-test.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Neumaier-compensated sum; the error does not grow with the term count.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if libm::fabs(sum) >= libm::fabs(v) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Count, mean and sample standard deviation of a column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample (n − 1) standard deviation; NaN for fewer than two values.
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let count = values.len();
        if count == 0 {
            return Summary {
                count,
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let std = if count < 2 {
            f64::NAN
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            libm::sqrt(ss / (count - 1) as f64)
        };
        Summary { count, mean, std }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub significant_at_5pct: bool,
}

/// Two-sided paired t-test on `xs − ys`.
///
/// All-zero differences give `t = 0, p = 1`. Constant non-zero differences
/// have zero spread and give `t = ±∞, p = 0`.
pub fn paired_t_test(xs: &[f64], ys: &[f64]) -> Result<TTestResult> {
    if xs.len() != ys.len() {
        return Err(Error::mismatch((xs.len(), 1), (ys.len(), 1)));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::SampleSize { required: 2, got: n });
    }
    let df = n - 1;
    let diffs: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x - y).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::param("samples", "must be finite"));
    }
    let s = Summary::of(&diffs);
    let (t, p) = if diffs.iter().all(|&d| d == 0.0) {
        (0.0, 1.0)
    } else if s.std == 0.0 {
        (if s.mean > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }, 0.0)
    } else {
        let t = s.mean / (s.std / libm::sqrt(n as f64));
        (t, student_t_two_sided(t, df as f64))
    };
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: p,
        significant_at_5pct: p < 0.05,
    })
}

/// `P(|T| ≥ |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(0.5 * df, 0.5, x).clamp(0.0, 1.0)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos approximation).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = core::f64::consts::PI;
        return libm::log(pi / libm::sin(pi * x)) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * libm::log(2.0 * core::f64::consts::PI) + (x + 0.5) * libm::log(t) - t + libm::log(acc)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * libm::log(x) + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const TOL: f64 = 1e-16;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if libm::fabs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=1000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < TOL {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(5.0) - libm::log(24.0)).abs() < 1e-13);
        assert!((ln_gamma(0.5) - 0.5 * libm::log(core::f64::consts::PI)).abs() < 1e-14);
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1, 1) = x, I_x(a, 1) = x^a
        for x in [0.1, 0.37, 0.5, 0.93] {
            assert!((regularized_incomplete_beta(1.0, 1.0, x) - x).abs() < 1e-14);
            assert!((regularized_incomplete_beta(3.0, 1.0, x) - x * x * x).abs() < 1e-14);
        }
    }

    #[test]
    fn t_with_one_dof_is_cauchy() {
        // P(|T| > t) = 1 - 2·atan(t)/π
        for t in [0.3, 1.0, 2.5, 12.0] {
            let expect = 1.0 - 2.0 * libm::atan(t) / core::f64::consts::PI;
            assert!((student_t_two_sided(t, 1.0) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn t_with_two_dof_closed_form() {
        // P(|T| > t) = 1 - t / sqrt(2 + t²)
        for t in [0.1, 0.9, 3.0, 40.0] {
            let expect = 1.0 - t / libm::sqrt(2.0 + t * t);
            assert!((student_t_two_sided(t, 2.0) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_differences_policy() {
        let xs = [0.3, 0.1, 0.7];
        let r = paired_t_test(&xs, &xs).unwrap();
        assert_eq!((r.t_statistic, r.p_value, r.significant_at_5pct), (0.0, 1.0, false));
    }

    #[test]
    fn constant_shift_is_maximally_significant() {
        let r = paired_t_test(&[1.0, 2.0, 3.0], &[0.5, 1.5, 2.5]).unwrap();
        assert_eq!(r.t_statistic, f64::INFINITY);
        assert_eq!(r.p_value, 0.0);
        assert!(r.significant_at_5pct);
    }

    #[test]
    fn sample_size_and_length_errors() {
        assert!(matches!(paired_t_test(&[1.0], &[2.0]), Err(Error::SampleSize { .. })));
        assert!(paired_t_test(&[1.0, 2.0], &[2.0]).is_err());
    }

    #[test]
    fn swapping_negates_t() {
        let xs = [1.2, 3.4, 2.2, 5.0, 4.1];
        let ys = [1.0, 3.0, 2.5, 4.0, 3.9];
        let a = paired_t_test(&xs, &ys).unwrap();
        let b = paired_t_test(&ys, &xs).unwrap();
        assert_eq!(a.t_statistic, -b.t_statistic);
        assert_eq!(a.p_value, b.p_value);
    }

    #[test]
    fn summary_basics() {
        let s = Summary::of(&[2.0]);
        assert_eq!((s.count, s.mean), (1, 2.0));
        assert!(s.std.is_nan());
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert!((s.std - libm::sqrt(5.0 / 3.0)).abs() < 1e-15);
    }
}
