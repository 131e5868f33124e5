//! Standard normal density, distribution function, its logarithm and its
//! inverse.
//!
//! `F` is evaluated through `erfc`, which keeps full relative accuracy in
//! the lower tail. `ln F` switches to the asymptotic tail series once `erfc`
//! would approach the subnormal range, so it never returns `-inf` for finite
//! input.

use crate::error::{domain, Result};
use crate::scalar::{lit, Real};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// `(2k-1)!!` for k = 1..=6, the coefficients of the Gaussian tail series
/// `F(z) ~ φ(z)/|z| · Σ (-1)^k (2k-1)!! / z^{2k}`.
const TAIL_SERIES: [f64; 6] = [1.0, 3.0, 15.0, 105.0, 945.0, 10395.0];

/// Standard normal density `φ(z)`.
#[inline]
pub fn std_normal_pdf<T: Real>(z: T) -> T {
    lit::<T>(FRAC_1_SQRT_2PI) * (-(z * z) * lit(0.5)).exp()
}

/// `ln φ(z)`.
#[inline]
pub fn ln_std_normal_pdf<T: Real>(z: T) -> T {
    -(z * z) * lit(0.5) - lit(LN_SQRT_2PI)
}

/// Standard normal distribution function `F(z)`.
#[inline]
pub fn std_normal_cdf<T: Real>(z: T) -> T {
    lit::<T>(0.5) * (-z * T::FRAC_1_SQRT_2()).erfc()
}

/// `ln F(z)` without underflow for any finite `z`.
pub fn log_std_normal_cdf<T: Real>(z: T) -> T {
    if z < lit(T::LOG_CDF_TAIL) {
        log_cdf_tail(z)
    } else if z < T::zero() {
        (lit::<T>(0.5) * (-z * T::FRAC_1_SQRT_2()).erfc()).ln()
    } else {
        (-lit::<T>(0.5) * (z * T::FRAC_1_SQRT_2()).erfc()).ln_1p()
    }
}

fn log_cdf_tail<T: Real>(z: T) -> T {
    let inv_z2 = (z * z).recip();
    let mut term = T::one();
    let mut sum = T::zero();
    for (k, &c) in TAIL_SERIES.iter().enumerate() {
        term = term * inv_z2;
        let t = lit::<T>(c) * term;
        sum = if k % 2 == 0 { sum - t } else { sum + t };
    }
    ln_std_normal_pdf(z) - (-z).ln() + sum.ln_1p()
}

/// Inverse of the standard normal distribution function.
///
/// Returns `DomainError` unless `0 < p < 1`.
pub fn std_normal_quantile<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(domain(format!("quantile needs 0 < p < 1, got {p}")));
    }
    let half = lit::<T>(0.5);
    if p == half {
        return Ok(T::zero());
    }
    if p > half {
        // 1 - p is exact for p in [1/2, 1].
        return Ok(-lower_quantile(T::one() - p));
    }
    Ok(lower_quantile(p))
}

/// Quantile for `p <= 1/2`: rational initial guess polished by Newton steps
/// on `ln F(x) = ln p`. `ln F` is concave, so after the first step the
/// iterates approach the root monotonically from the left.
fn lower_quantile<T: Real>(p: T) -> T {
    let target = p.ln();
    let mut x = lit::<T>(acklam_guess(p.to_f64().unwrap_or(0.5)));
    let tol = lit::<T>(4.0) * T::epsilon();
    for _ in 0..64 {
        let lf = log_std_normal_cdf(x);
        let step = (lf - target) * (lf - ln_std_normal_pdf(x)).exp();
        if !step.is_finite() {
            break;
        }
        x = x - step;
        if step.abs() <= tol * (T::one() + x.abs()) {
            break;
        }
    }
    x
}

/// Acklam's rational approximation of the lower half of the normal
/// quantile (relative error about 1e-9).
#[allow(clippy::excessive_precision)]
fn acklam_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549671010453319e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision, clippy::inconsistent_digit_grouping, clippy::approx_constant)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values from 40-digit mpmath evaluations of ncdf / log(ncdf).
    const CDF_REF: [(f64, f64); 10] = [
        (-8.0, 6.220_960_574_271_784_1e-16),
        (-5.0, 2.866_515_718_791_939_1e-7),
        (-3.0, 0.001_349_898_031_630_094_526_7),
        (-1.5, 0.066_807_201_268_858_066),
        (-0.3, 0.382_088_577_811_047_37),
        (0.5, 0.691_462_461_274_013_1),
        (1.414214, 0.921_350_460_702_127_6),
        (2.0, 0.977_249_868_051_820_8),
        (5.0, 0.999_999_713_348_428_1),
        (8.0, 0.999_999_999_999_999_4),
    ];

    const LOG_CDF_REF: [(f64, f64); 9] = [
        (-10.0, -53.231_285_150_512_47),
        (-20.0, -203.917_155_371_097_26),
        (-36.0, -652.503_227_593_798_4),
        (-37.5, -707.668_989_317_507_2),
        (-40.0, -804.608_442_013_753_8),
        (-100.0, -5005.524_208_694_205),
        (-1000.0, -500_007.826_694_812_2),
        (3.0, -0.001_350_809_964_748_193_8),
        (8.0, -6.220_960_574_271_786e-16),
    ];

    #[test]
    fn pdf_values() {
        assert_relative_eq!(std_normal_pdf(0.0), FRAC_1_SQRT_2PI, max_relative = 1e-15);
        assert_eq!(std_normal_pdf(1.0), std_normal_pdf(-1.0));
        assert_relative_eq!(
            std_normal_pdf(3.0),
            0.004_431_848_411_938_007_2,
            max_relative = 1e-14
        );
    }

    #[test]
    fn cdf_matches_high_precision_reference() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        for (z, want) in CDF_REF {
            let got = std_normal_cdf(z);
            assert!(
                ((got - want) / want).abs() <= 1e-14,
                "F({z}) = {got:e}, want {want:e}"
            );
        }
    }

    #[test]
    fn cdf_far_tail() {
        // F(-10) = φ(10)/10 · (1 - 1/100 + ...) ≈ 7.62e-24.
        let lower = std_normal_cdf(-10.0);
        assert!(lower > 0.0 && lower < 1e-22);
        assert_relative_eq!(lower, 7.619_853_024_160_526e-24, max_relative = 1e-13);
        let upper = std_normal_cdf(10.0);
        assert!(upper <= 1.0 && 1.0 - upper < 1e-22);
    }

    #[test]
    fn cdf_reflection() {
        for i in -80..=80 {
            let z = i as f64 * 0.1;
            let s = std_normal_cdf(z) + std_normal_cdf(-z);
            assert!((s - 1.0).abs() <= 2.0 * f64::EPSILON, "z = {z}: {s}");
        }
    }

    #[test]
    fn log_cdf_matches_reference() {
        assert_relative_eq!(log_std_normal_cdf(0.0), -std::f64::consts::LN_2, max_relative = 1e-15);
        for (z, want) in LOG_CDF_REF {
            let got = log_std_normal_cdf(z);
            // Absolute 1e-12 where erfc is used, relative 1e-14 on the series.
            let allowed = if z >= -37.0 { 1e-12 } else { 1e-14 * want.abs() };
            assert!(
                (got - want).abs() <= allowed,
                "ln F({z}) = {got}, want {want}"
            );
        }
        let at8 = log_std_normal_cdf(8.0);
        assert!(at8 < 0.0 && at8 > -1e-15);
    }

    #[test]
    fn log_cdf_tail_switch_is_continuous() {
        let z = <f64 as Real>::LOG_CDF_TAIL;
        let series = log_cdf_tail(z);
        let direct = (0.5 * Real::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)).ln();
        assert!((series - direct).abs() < 1e-12, "{series} vs {direct}");
    }

    #[test]
    fn log_cdf_agrees_with_cdf() {
        for i in -80..=80 {
            let z = i as f64 * 0.1;
            let f = std_normal_cdf(z);
            let g = log_std_normal_cdf(z).exp();
            assert!(((g - f) / f).abs() <= 1e-13, "z = {z}");
        }
    }

    #[test]
    fn quantile_values() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        let x: f64 = std_normal_quantile(0.921_350_4).unwrap();
        assert!((x - 1.414_213_586_392_437).abs() < 1e-12);
        for (p, want) in [
            (0.01f64, -2.326_347_874_040_841),
            (0.3, -0.524_400_512_708_040_8),
            (0.975, 1.959_963_984_540_054),
            (1e-10, -6.361_340_902_404_056),
            (1e-300, -37.047_096_299_361_2),
        ] {
            let got = std_normal_quantile(p).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "p = {p}: {got}");
        }
    }

    #[test]
    fn quantile_round_trip() {
        let z: f64 = std_normal_quantile(std_normal_cdf(1.7)).unwrap();
        assert!((z - 1.7).abs() < 1e-10);
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let x = std_normal_quantile(p).unwrap();
            assert!((std_normal_cdf(x) - p).abs() <= 1e-12, "p = {p}");
        }
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(std_normal_quantile(p).is_err());
        }
    }

    #[test]
    fn single_precision_instantiation() {
        assert!((std_normal_cdf(1.0f32) - 0.841_344_7).abs() < 1e-6);
        assert!(log_std_normal_cdf(-20.0f32).is_finite());
        let x = std_normal_quantile(0.975f32).unwrap();
        assert!((x - 1.959_964).abs() < 1e-5);
    }
}
