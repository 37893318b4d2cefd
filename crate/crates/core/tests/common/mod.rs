//! Test-only helpers: an extended-precision erf oracle and grid builders.

#![allow(dead_code)]

use std::ops::{Add, Mul, Neg};

/// Unevaluated sum `hi + lo` of two doubles (~32 significant digits).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> DD {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    DD { hi: s, lo: err }
}

fn quick_two_sum(a: f64, b: f64) -> DD {
    let s = a + b;
    DD { hi: s, lo: b - (s - a) }
}

impl DD {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let p = DD::from_f64(q1) * DD::from_f64(d);
        let r = self + (-p);
        let q2 = r.hi / d;
        quick_two_sum(q1, q2)
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, o: DD) -> DD {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, o: DD) -> DD {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        let err = err + (self.hi * o.lo + self.lo * o.hi);
        quick_two_sum(p, err)
    }
}

pub const TWO_OVER_SQRT_PI: DD = DD::new(std::f64::consts::FRAC_2_SQRT_PI, 1.533545961316588e-17);
pub const FRAC_1_SQRT_2: DD = DD::new(std::f64::consts::FRAC_1_SQRT_2, -4.833646656726457e-17);

/// erf by its Maclaurin series `2/√π Σ (−1)ⁿ x^(2n+1) / (n! (2n+1))`, summed in
/// double-double until terms fall below 1e-40. Accurate to far better than
/// 1e-16 for |x| ≤ 6.
pub fn erf_series(x: DD) -> f64 {
    let x2 = x * x;
    let mut term = x; // (−1)ⁿ x^(2n+1) / n!
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term = (-(term * x2)).div_f64(n);
        let contrib = term.div_f64(2.0 * n + 1.0);
        sum = sum + contrib;
        if contrib.hi.abs() < 1e-40 {
            break;
        }
    }
    (TWO_OVER_SQRT_PI * sum).to_f64()
}

/// Φ(x) = (1 + erf(x/√2)) / 2 through the series oracle.
pub fn ncdf_series(x: f64) -> f64 {
    let e = erf_series(DD::from_f64(x) * FRAC_1_SQRT_2);
    // 1 + e in double-double before halving
    let s = two_sum(1.0, e);
    0.5 * (s.hi + s.lo)
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => lo + (hi - lo) * i as f64 / (n - 1) as f64,
        })
        .collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
