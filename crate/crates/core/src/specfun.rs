//! Double-precision special functions for the standard Gaussian.
//!
//! `erf`, `erfc` and the scaled `erfcx` use W. J. Cody's rational Chebyshev
//! approximations (the netlib `CALERF` routine), which are accurate to a few
//! ulps over the whole real line. The Gaussian quantile starts from Wichura's
//! AS 241 rational approximation and is polished by one Halley step against
//! [`std_normal_cdf`], always working in the lower tail so that upper-tail
//! probabilities such as `1 - delta/2` never lose digits to cancellation.
//!
//! All functions are pure and may be called concurrently.

// coefficients are kept exactly as published
#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, SQRT_2};

use crate::error::{domain, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(domain(format!("probability must be in [0,1], got {p}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

// Cody's CALERF coefficients.
const THRESH: f64 = 0.46875;
const XSMALL: f64 = 1.11e-16;
const XBIG: f64 = 26.543;
const XHUGE: f64 = 6.71e7;
const XNEG: f64 = -26.628;

const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_16,
    377.485_237_685_302,
    3_209.377_589_138_469_5,
    0.185_777_706_184_603_15,
];
const B: [f64; 4] = [
    23.601_290_952_344_122,
    244.024_637_934_444_17,
    1_282.616_526_077_372_3,
    2_844.236_833_439_170_6,
];
const C: [f64; 9] = [
    0.564_188_496_988_670_1,
    8.883_149_794_388_376,
    66.119_190_637_141_63,
    298.635_138_197_400_1,
    881.952_221_241_769_1,
    1_712.047_612_634_070_6,
    2_051.078_377_826_071_5,
    1_230.339_354_797_997_2,
    2.153_115_354_744_038_5e-8,
];
const D: [f64; 8] = [
    15.744_926_110_709_835,
    117.693_950_891_312_5,
    537.181_101_862_009_9,
    1_621.389_574_566_690_2,
    3_290.799_235_733_459_7,
    4_362.619_090_143_247,
    3_439.367_674_143_721_6,
    1_230.339_354_803_749_4,
];
const P: [f64; 6] = [
    0.305_326_634_961_232_36,
    0.360_344_899_949_804_45,
    0.125_781_726_111_229_24,
    0.016_083_785_148_742_275,
    6.587_491_615_298_378e-4,
    0.016_315_387_137_302_097,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822,
    1.872_952_849_923_460_4,
    0.527_905_102_951_428_4,
    0.060_518_341_312_441_32,
    0.002_335_204_976_268_691_8,
];

/// erf(x) for |x| <= THRESH.
fn erf_small(x: f64) -> f64 {
    let y = x.abs();
    let ysq = if y > XSMALL { y * y } else { 0.0 };
    let mut num = A[4] * ysq;
    let mut den = ysq;
    for i in 0..3 {
        num = (num + A[i]) * ysq;
        den = (den + B[i]) * ysq;
    }
    x * (num + A[3]) / (den + B[3])
}

/// exp(y^2) * erfc(y) for y > THRESH.
fn erfcx_large(y: f64) -> f64 {
    if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        (num + C[7]) / (den + D[7])
    } else if y >= XHUGE {
        FRAC_1_SQRT_PI / y
    } else {
        let ysq = 1.0 / (y * y);
        let mut num = P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + P[i]) * ysq;
            den = (den + Q[i]) * ysq;
        }
        let r = ysq * (num + P[4]) / (den + Q[4]);
        (FRAC_1_SQRT_PI - r) / y
    }
}

/// exp(-y^2), splitting y^2 so the rounding of the square does not leak into the result.
fn exp_neg_sq(y: f64) -> f64 {
    let head = (y * 16.0).trunc() / 16.0;
    let tail = (y - head) * (y + head);
    (-head * head).exp() * (-tail).exp()
}

fn exp_sq(y: f64) -> f64 {
    let head = (y * 16.0).trunc() / 16.0;
    let tail = (y - head) * (y + head);
    (head * head).exp() * tail.exp()
}

pub(crate) fn erf_raw(x: f64) -> f64 {
    let y = x.abs();
    if y <= THRESH {
        return erf_small(x);
    }
    let r = if y >= 6.0 {
        1.0
    } else {
        (0.5 - exp_neg_sq(y) * erfcx_large(y)) + 0.5
    };
    r.copysign(x)
}

pub(crate) fn erfc_raw(x: f64) -> f64 {
    let y = x.abs();
    if y <= THRESH {
        return 1.0 - erf_small(x);
    }
    let r = if y >= XBIG {
        0.0
    } else {
        exp_neg_sq(y) * erfcx_large(y)
    };
    if x < 0.0 {
        2.0 - r
    } else {
        r
    }
}

pub(crate) fn erfcx_raw(x: f64) -> f64 {
    let y = x.abs();
    let r = if y <= THRESH {
        (1.0 - erf_small(y)) * (y * y).exp()
    } else {
        erfcx_large(y)
    };
    if x >= 0.0 {
        r
    } else if x < XNEG {
        f64::INFINITY
    } else {
        2.0 * exp_sq(y) - r
    }
}

/// Standard Gaussian distribution function without argument checks.
pub(crate) fn ncdf(x: f64) -> f64 {
    0.5 * erfc_raw(-x * FRAC_1_SQRT_2)
}

/// log(Phi(x)), stable for arbitrarily negative x.
pub(crate) fn log_ncdf(x: f64) -> f64 {
    if x >= 0.0 {
        (-ncdf(-x)).ln_1p()
    } else {
        // Phi(x) = erfcx(y) exp(-y^2) / 2 with y = -x / sqrt(2)
        let y = -x * FRAC_1_SQRT_2;
        erfcx_raw(y).ln() - LN_2 - y * y
    }
}

// Wichura, AS 241 (PPND16).
const Q_A: [f64; 8] = [
    3.387_132_872_796_366_5,
    133.141_667_891_784_38,
    1_971.590_950_306_551_3,
    13_731.693_765_509_461,
    45_921.953_931_549_87,
    67_265.770_927_008_7,
    33_430.575_583_588_13,
    2_509.080_928_730_122_7,
];
const Q_B: [f64; 8] = [
    1.0,
    42.313_330_701_600_91,
    687.187_007_492_057_9,
    5_394.196_021_424_751,
    21_213.794_301_586_597,
    39_307.895_800_092_71,
    28_729.085_735_721_943,
    5_226.495_278_852_546,
];
const Q_C: [f64; 8] = [
    1.423_437_110_749_683_5,
    4.630_337_846_156_545,
    5.769_497_221_460_691,
    3.647_848_324_763_204_5,
    1.270_458_252_452_368_4,
    0.241_780_725_177_450_6,
    0.022_723_844_989_269_184,
    7.745_450_142_783_414e-4,
];
const Q_D: [f64; 8] = [
    1.0,
    2.053_191_626_637_759,
    1.676_384_830_183_803_8,
    0.689_767_334_985_1,
    0.148_103_976_427_480_08,
    0.015_198_666_563_616_457,
    5.475_938_084_995_345e-4,
    1.050_750_071_644_416_8e-9,
];
const Q_E: [f64; 8] = [
    6.657_904_643_501_104,
    5.463_784_911_164_114,
    1.784_826_539_917_291_3,
    0.296_560_571_828_504_9,
    0.026_532_189_526_576_124,
    0.001_242_660_947_388_078_4,
    2.711_555_568_743_487_6e-5,
    2.010_334_399_292_288_1e-7,
];
const Q_F: [f64; 8] = [
    1.0,
    0.599_832_206_555_887_9,
    0.136_929_880_922_735_8,
    0.014_875_361_290_850_615,
    7.868_691_311_456_133e-4,
    1.846_318_317_510_054_8e-5,
    1.421_511_758_316_446e-7,
    2.044_263_103_389_939_7e-15,
];

fn poly(c: &[f64; 8], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Initial AS 241 estimate of Phi^-1(p) for 0 < p <= 1/2.
fn as241_lower(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&Q_A, r) / poly(&Q_B, r);
    }
    let r = (-p.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&Q_C, r) / poly(&Q_D, r)
    } else {
        let r = r - 5.0;
        poly(&Q_E, r) / poly(&Q_F, r)
    };
    -x
}

/// Phi^-1(p) for 0 < p <= 1/2, refined with one Halley step.
fn quantile_lower(p: f64) -> f64 {
    let x = as241_lower(p);
    let e = ncdf(x) - p;
    let u = e * SQRT_2PI * (0.5 * x * x).exp();
    if !u.is_finite() {
        return x;
    }
    x - u / (1.0 + 0.5 * x * u)
}

/// Phi^-1(p) for 0 < p < 1 without argument checks.
pub(crate) fn nquantile(p: f64) -> f64 {
    if p < 0.5 {
        quantile_lower(p)
    } else if p > 0.5 {
        // 1 - p is exact for p in [1/2, 1]
        -quantile_lower(1.0 - p)
    } else {
        0.0
    }
}

/// The error function.
///
/// Non-finite input is rejected; use the limits `erf(±∞) = ±1` directly if needed.
pub fn erf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("erf requires a finite argument, got {x}")));
    }
    Ok(erf_raw(x))
}

/// The complementary error function `1 - erf(x)`, accurate in the upper tail.
pub fn erfc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("erfc requires a finite argument, got {x}")));
    }
    Ok(erfc_raw(x))
}

/// Standard Gaussian distribution function. Accepts `±∞`; rejects NaN.
pub fn std_normal_cdf(x: f64) -> Result<Probability> {
    if x.is_nan() {
        return Err(domain("standard normal cdf is undefined at NaN"));
    }
    Ok(Probability(ncdf(x)))
}

/// `log(Phi(x))`, finite for every finite `x` (no underflow in the lower tail).
pub fn log_std_normal_cdf(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("log standard normal cdf is undefined at NaN"));
    }
    if x == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(log_ncdf(x))
}

/// Standard Gaussian density. Flushes to zero beyond |x| ≈ 38.6.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() * FRAC_1_SQRT_2PI
}

/// Standard Gaussian quantile, `Phi^-1(p)` for `0 < p < 1`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!(
            "quantile argument must be in (0,1), got {p}"
        )));
    }
    Ok(nquantile(p))
}

/// Upper-tail quantile `Phi^-1(1 - q)`, computed without forming `1 - q`.
pub fn std_normal_upper_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(domain(format!(
            "upper-tail probability must be in (0,1), got {q}"
        )));
    }
    Ok(-nquantile(q))
}

/// Closed-form upper bound `sqrt(2) * sqrt(-log(1 - (2p - 1)^2))` on `Phi^-1(p)`, for `1/2 <= p < 1`.
pub fn quantile_upper_bound(p: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&p) {
        return Err(domain(format!(
            "quantile upper bound requires p in [1/2,1), got {p}"
        )));
    }
    // 1 - (2p - 1)^2 == 4 p (1 - p)
    let t = 4.0 * p * (1.0 - p);
    Ok(SQRT_2 * (-t.ln()).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_reference_values() {
        assert_eq!(erf(0.0).unwrap(), 0.0);
        assert!((erf(10.0).unwrap() - 1.0).abs() <= 1e-15);
        assert!((erf(1.0).unwrap() - 0.842_700_792_949_714_9).abs() <= 1e-15);
        assert!(erf(f64::NAN).is_err());
        assert!(erf(f64::INFINITY).is_err());
    }

    #[test]
    fn erf_is_odd() {
        for i in 0..400 {
            let x = -7.0 + 0.0351 * i as f64;
            assert_eq!(erf_raw(-x), -erf_raw(x));
        }
    }

    #[test]
    fn erfc_and_erfcx_agree_with_erf() {
        for i in 0..200 {
            let x = -5.0 + 0.05 * i as f64;
            let c = erfc_raw(x);
            assert!((c - (1.0 - erf_raw(x))).abs() < 1e-15, "x={x}");
            let cx = erfcx_raw(x);
            assert!((cx * (-x * x).exp() - c).abs() <= 1e-14 * c.max(1e-300), "x={x}");
        }
    }

    #[test]
    fn cdf_reference_values() {
        assert_eq!(std_normal_cdf(0.0).unwrap().value(), 0.5);
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY).unwrap().value(), 0.0);
        assert_eq!(std_normal_cdf(f64::INFINITY).unwrap().value(), 1.0);
        let p = std_normal_cdf(1.0).unwrap().value();
        assert!((p - 0.841_344_746_068_542_9).abs() <= 1e-15);
        assert!(std_normal_cdf(f64::NAN).is_err());
    }

    #[test]
    fn cdf_symmetry() {
        for i in 0..=1600 {
            let x = -8.0 + 0.01 * i as f64;
            assert!((ncdf(x) + ncdf(-x) - 1.0).abs() <= 1e-15, "x={x}");
        }
    }

    #[test]
    fn pdf_values() {
        assert_eq!(std_normal_pdf(0.0), 0.398_942_280_401_432_7);
        assert_eq!(std_normal_pdf(2.0), std_normal_pdf(-2.0));
        let tail = std_normal_pdf(40.0);
        assert!((0.0..1e-300).contains(&tail));
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        let h = 1e-5;
        for i in 0..=160 {
            let x = -8.0 + 0.1 * i as f64;
            let fd = (ncdf(x + h) - ncdf(x - h)) / (2.0 * h);
            assert!((fd - std_normal_pdf(x)).abs() <= 1e-6, "x={x}");
        }
    }

    #[test]
    fn log_cdf_tail() {
        assert!((log_ncdf(0.0) - 0.5f64.ln()).abs() < 1e-16);
        // mid range agrees with the direct route
        for i in 0..100 {
            let x = -10.0 + 0.2 * i as f64;
            let direct = ncdf(x).ln();
            assert!((log_ncdf(x) - direct).abs() <= 1e-13 * direct.abs().max(1.0), "x={x}");
        }
        // far tail stays finite, dominated by -x^2/2 - log(-x sqrt(2 pi))
        let x = -1000.0f64;
        let asym = -0.5 * x * x - (-x * SQRT_2PI).ln();
        assert!((log_ncdf(x) - asym).abs() < 1e-5);
        assert_eq!(log_std_normal_cdf(f64::NEG_INFINITY).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn quantile_reference_values() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        let x = std_normal_quantile(0.841_344_746_068_542_9).unwrap();
        assert!((x - 1.0).abs() <= 1e-10);
        let hi = std_normal_quantile(0.975).unwrap();
        let lo = std_normal_quantile(0.025).unwrap();
        assert!((hi + lo).abs() <= 1e-12);
        assert!((hi - 1.959_963_984_540_054).abs() <= 1e-14);
    }

    #[test]
    fn quantile_domain_errors() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(std_normal_quantile(p).is_err(), "p={p}");
        }
        assert!(std_normal_upper_quantile(0.0).is_err());
    }

    #[test]
    fn quantile_round_trip() {
        for i in 0..=1200 {
            let x = -6.0 + 0.01 * i as f64;
            let back = nquantile(ncdf(x));
            assert!((back - x).abs() <= 1e-8, "x={x} back={back}");
        }
        let mut p = 1e-12;
        while p < 1.0 - 1e-12 {
            assert!((ncdf(nquantile(p)) - p).abs() <= 1e-12, "p={p}");
            p = if p < 0.5 { p * 1.37 } else { 1.0 - (1.0 - p) / 1.37 };
        }
    }

    #[test]
    fn upper_quantile_matches_quantile() {
        for q in [1e-300, 1e-20, 1e-5, 0.01, 0.3, 0.5] {
            let a = std_normal_upper_quantile(q).unwrap();
            assert!(a >= 0.0 || q > 0.5);
            // relative conditioning of Phi at x is about x^2 ulps
            let tol = 4.0 * f64::EPSILON * (1.0 + a * a);
            assert!((ncdf(-a) - q).abs() <= tol * q, "q={q}");
        }
    }

    #[test]
    fn quantile_bound_values() {
        assert_eq!(quantile_upper_bound(0.5).unwrap(), 0.0);
        // p = 1 - delta/2 with delta = 1
        assert_eq!(quantile_upper_bound(1.0 - 1.0 / 2.0).unwrap(), 0.0);
        let p = 0.999_999_5;
        assert!(quantile_upper_bound(p).unwrap() > std_normal_quantile(p).unwrap());
        assert!(quantile_upper_bound(0.49).is_err());
        assert!(quantile_upper_bound(1.0).is_err());
    }
}
