//! Comparison of the standard bound against the closed-form bound.
//!
//! Pointwise quantities:
//!
//! * `w(ε, δ)`: the sufficient-condition threshold `v` evaluated at the
//!   standard σ (independent of Δ).
//! * `g(ε, δ) = δ − Pr(|Z| > w)`: negative where the standard σ violates the
//!   sufficient condition.
//! * `d(ε, δ) = δ − balle_lhs(standard σ)`: negative where the standard σ is
//!   not `(ε, δ)`-private at all.
//! * `r(ε, δ)`: standard σ over closed-form σ, its ε-derivative, the
//!   crossover `ε(δ)` where `r = 1`, and `ρ(δ) = r(0, δ)`.
//!
//! [`evaluate_surface`] tabulates any of these over a [`GridSpec`].

use rayon::prelude::*;

use std::f64::consts::SQRT_2;
use std::str::FromStr;

use crate::calibrate::{log_5_over_4delta, z_of, PrivacyParams};
use crate::error::{domain, Error, Result};
use crate::exact::balle_lhs_raw;
use crate::specfun::ncdf;

fn check_open_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("delta must be in (0,1), got {delta}")));
    }
    Ok(())
}

/// `w(ε, δ) = √2 (4L − ε) / (4√L)` with `L = log(5/(4δ))`.
pub fn w_value(params: &PrivacyParams) -> Result<f64> {
    let l = log_5_over_4delta(params.delta());
    if l <= 0.0 {
        return Err(domain(format!("delta must be < 5/4, got {}", params.delta())));
    }
    Ok(SQRT_2 * (4.0 * l - params.epsilon()) / (4.0 * l.sqrt()))
}

/// `g(ε, δ) = δ − Pr(|Z| > w(ε, δ))`.
///
/// For `w ≤ 0` the probability is 1, so `g = δ − 1`.
pub fn g_value(params: &PrivacyParams) -> Result<f64> {
    let w = w_value(params)?;
    let tail = if w <= 0.0 { 1.0 } else { 2.0 * ncdf(-w) };
    Ok(params.delta() - tail)
}

/// `d(ε, δ) = δ − balle_lhs(s(ε, δ, 1))` where `s` is the standard σ.
pub fn d_value(params: &PrivacyParams) -> Result<f64> {
    let l = log_5_over_4delta(params.delta());
    if l <= 0.0 {
        return Err(domain(format!("delta must be < 5/4, got {}", params.delta())));
    }
    let eps = params.epsilon();
    let sigma = SQRT_2 / eps * l.sqrt();
    Ok(params.delta() - balle_lhs_raw(sigma, eps, 1.0))
}

/// Ratio of the standard bound to the closed-form bound,
/// `2√L / (√z + √(z + ε))`. At `ε = 0` this is [`rho_value`].
pub fn ratio_r(epsilon: f64, delta: f64) -> Result<f64> {
    check_open_delta(delta)?;
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(domain(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    let l = log_5_over_4delta(delta);
    let z = z_of(delta);
    Ok(2.0 * l.sqrt() / (z.sqrt() + (z + epsilon).sqrt()))
}

/// `∂r/∂ε = −√L / ((√z + √(z + ε))² √(z + ε))`; negative everywhere.
pub fn ratio_r_deps(epsilon: f64, delta: f64) -> Result<f64> {
    check_open_delta(delta)?;
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(domain(format!("epsilon must be finite and > 0, got {epsilon}")));
    }
    let l = log_5_over_4delta(delta);
    let z = z_of(delta);
    let root = (z + epsilon).sqrt();
    let sum = z.sqrt() + root;
    Ok(-l.sqrt() / (sum * sum * root))
}

/// The ε at which both bounds coincide: `4L − 4√L √z`.
pub fn crossover_epsilon(delta: f64) -> Result<f64> {
    check_open_delta(delta)?;
    let l = log_5_over_4delta(delta);
    let z = z_of(delta);
    Ok(4.0 * l - 4.0 * l.sqrt() * z.sqrt())
}

/// `ρ(δ) = √(L / z)`, the supremum of `r(·, δ)` over `ε > 0`.
pub fn rho_value(delta: f64) -> Result<f64> {
    check_open_delta(delta)?;
    Ok((log_5_over_4delta(delta) / z_of(delta)).sqrt())
}

/// Axis point spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(domain(format!("unknown spacing '{other}'"))),
        }
    }
}

/// One grid axis: `n` points from `lo` to `hi` inclusive.
///
/// `n = 1` is allowed when `lo == hi` (a single point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(domain("axis bounds must be finite"));
        }
        match n {
            0 => return Err(domain("axis needs at least one point")),
            1 if lo != hi => return Err(domain(format!("a single-point axis needs lo == hi, got {lo}:{hi}"))),
            1 => {}
            _ if lo >= hi => return Err(domain(format!("axis needs lo < hi, got {lo}:{hi}"))),
            _ => {}
        }
        Ok(Self { lo, hi, n })
    }

    pub fn points(&self, spacing: Spacing) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i == self.n - 1 {
                    return self.hi;
                }
                let t = i as f64 / last;
                match spacing {
                    Spacing::Linear => self.lo + t * (self.hi - self.lo),
                    Spacing::Log => (self.lo.ln() + t * (self.hi.ln() - self.lo.ln())).exp(),
                }
            })
            .collect()
    }
}

/// Rectangular `(ε, δ)` evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub eps: Axis,
    pub delta: Axis,
    pub spacing: Spacing,
}

const MAX_GRID_POINTS: usize = 100_000_000;

impl GridSpec {
    pub fn new(eps: Axis, delta: Axis, spacing: Spacing) -> Result<Self> {
        if eps.lo <= 0.0 {
            return Err(domain(format!("epsilon axis must be > 0, got lower bound {}", eps.lo)));
        }
        if !(delta.lo > 0.0 && delta.hi < 1.0) {
            return Err(domain(format!(
                "delta axis must lie in (0,1), got {}:{}",
                delta.lo, delta.hi
            )));
        }
        if eps.n.saturating_mul(delta.n) > MAX_GRID_POINTS {
            return Err(domain("grid exceeds 1e8 points"));
        }
        Ok(Self { eps, delta, spacing })
    }
}

/// Quantity tabulated by [`evaluate_surface`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    G,
    D,
    R,
    Rho,
    Crossover,
}

impl SurfaceKind {
    /// `ρ` and the crossover depend on δ only.
    pub fn is_one_dimensional(self) -> bool {
        matches!(self, SurfaceKind::Rho | SurfaceKind::Crossover)
    }

    /// Whether `value` is in the "bad" region for this surface:
    /// negative for `g`/`d`, below 1 for `r`/`ρ`, non-positive for the crossover.
    pub fn is_violated(self, value: f64) -> bool {
        match self {
            SurfaceKind::G | SurfaceKind::D => value < 0.0,
            SurfaceKind::R | SurfaceKind::Rho => value < 1.0,
            SurfaceKind::Crossover => value <= 0.0,
        }
    }

    fn eval(self, eps: f64, delta: f64) -> Result<f64> {
        match self {
            SurfaceKind::G => g_value(&PrivacyParams::new(eps, delta)?),
            SurfaceKind::D => d_value(&PrivacyParams::new(eps, delta)?),
            SurfaceKind::R => ratio_r(eps, delta),
            SurfaceKind::Rho => rho_value(delta),
            SurfaceKind::Crossover => crossover_epsilon(delta),
        }
    }
}

impl FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" => Ok(SurfaceKind::G),
            "d" => Ok(SurfaceKind::D),
            "r" => Ok(SurfaceKind::R),
            "rho" => Ok(SurfaceKind::Rho),
            "crossover" => Ok(SurfaceKind::Crossover),
            other => Err(domain(format!("unknown surface '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    /// `None` for surfaces that depend on δ only.
    pub epsilon: Option<f64>,
    pub delta: f64,
    pub value: f64,
    pub violated: bool,
}

/// Evaluates `kind` on every grid point, δ outer and ε inner.
///
/// Points outside the function's domain are dropped; an error is returned
/// only if no point survives. Rows are computed in parallel but the output
/// order is always that of the sequential scan.
pub fn evaluate_surface(kind: SurfaceKind, grid: &GridSpec) -> Result<Vec<SurfacePoint>> {
    let deltas = grid.delta.points(grid.spacing);
    let eps = if kind.is_one_dimensional() {
        vec![None]
    } else {
        grid.eps.points(grid.spacing).into_iter().map(Some).collect()
    };
    let rows: Vec<Vec<SurfacePoint>> = deltas
        .par_iter()
        .map(|&delta| {
            eps.iter()
                .filter_map(|&e| {
                    let value = kind.eval(e.unwrap_or(0.0), delta).ok()?;
                    Some(SurfacePoint { epsilon: e, delta, value, violated: kind.is_violated(value) })
                })
                .collect()
        })
        .collect();
    let points: Vec<SurfacePoint> = rows.into_iter().flatten().collect();
    if points.is_empty() {
        return Err(domain(format!("no grid point lies in the domain of surface {kind:?}")));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::{closed_form_sigma, standard_sigma, Sensitivity};
    use crate::exact::v_threshold;

    fn p(eps: f64, delta: f64) -> PrivacyParams {
        PrivacyParams::new(eps, delta).unwrap()
    }

    #[test]
    fn w_root_and_delta_independence() {
        let eps = 1.2;
        let delta = 1.25 * (-eps / 4.0f64).exp();
        assert!(w_value(&p(eps, delta)).unwrap().abs() < 1e-15);
        let params = p(0.5, 0.01);
        let w = w_value(&params).unwrap();
        for dq in [1.0, 10.0] {
            let sens = Sensitivity::new(dq).unwrap();
            let s = standard_sigma(&params, sens).unwrap().sigma;
            let v = v_threshold(s, &params, sens).unwrap();
            assert!((v - w).abs() < 1e-12, "dq={dq}");
        }
    }

    #[test]
    fn g_values() {
        let g = g_value(&p(0.97, 0.97)).unwrap();
        assert!(g < -0.005 && g > -0.1);
        assert!(g_value(&p(0.5, 1e-5)).unwrap() >= 0.0);
        let eps = 1.2;
        let delta = 1.25 * (-eps / 4.0f64).exp();
        assert!((g_value(&p(eps, delta)).unwrap() - (delta - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn d_values() {
        assert!(d_value(&p(0.5, 1e-3)).unwrap() >= 0.0);
        let min = (0..=190)
            .map(|i| d_value(&p(1.0 + 0.1 * i as f64, 1e-3)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(min < 0.0);
        // independent of the sensitivity used to evaluate it
        let params = p(0.7, 0.02);
        let sens = Sensitivity::new(5.0).unwrap();
        let s = standard_sigma(&params, sens).unwrap().sigma;
        let via_sens = 0.02 - crate::exact::balle_lhs(s, &params, sens).unwrap();
        assert!((via_sens - d_value(&params).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn ratio_values() {
        assert!(ratio_r(0.0, 1e-8).unwrap() < 1.026);
        assert_eq!(ratio_r(0.0, 0.2).unwrap(), rho_value(0.2).unwrap());
        let c = crossover_epsilon(0.5).unwrap();
        assert!((ratio_r(c, 0.5).unwrap() - 1.0).abs() < 1e-10);
        assert!(ratio_r(0.2, 0.1).unwrap() > ratio_r(0.8, 0.1).unwrap());
        assert!(ratio_r(0.5, 1.0).is_err());
        assert!(ratio_r(-0.5, 0.1).is_err());
        let params = p(0.4, 0.03);
        let one = Sensitivity::new(1.0).unwrap();
        let q = standard_sigma(&params, one).unwrap().sigma / closed_form_sigma(&params, one).unwrap().sigma;
        assert!((q - ratio_r(0.4, 0.03).unwrap()).abs() < 1e-12 * q);
    }

    #[test]
    fn derivative_values() {
        assert!(ratio_r_deps(0.5, 0.1).unwrap() < 0.0);
        let h = 1e-5;
        let fd = (ratio_r(0.5 + h, 0.1).unwrap() - ratio_r(0.5 - h, 0.1).unwrap()) / (2.0 * h);
        let an = ratio_r_deps(0.5, 0.1).unwrap();
        assert!(((fd - an) / an).abs() < 1e-6);
        assert!(ratio_r_deps(0.5, 1e-10).unwrap().abs() < ratio_r_deps(0.5, 1e-2).unwrap().abs());
    }

    #[test]
    fn crossover_values() {
        assert!(crossover_epsilon(0.946).unwrap() > 1.0);
        let c = crossover_epsilon(0.3).unwrap();
        assert!((ratio_r(c, 0.3).unwrap() - 1.0).abs() < 1e-10);
        let min = (1..=1000)
            .map(|i| crossover_epsilon(0.946 * i as f64 / 1001.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(min > 0.0);
        assert!(crossover_epsilon(1.0).is_err());
    }

    #[test]
    fn rho_values() {
        let r = rho_value(1e-8).unwrap();
        assert!(r > 1.0 && r < 1.026);
        let tiny = rho_value(1e-300).unwrap();
        assert!(tiny > 1.0 && tiny < 1.001);
        assert!(rho_value(0.5).unwrap() > rho_value(0.05).unwrap());
        assert!(rho_value(1.0).is_err());
    }

    #[test]
    fn axis_points() {
        let a = Axis::new(1.0, 100.0, 3).unwrap();
        let lin = a.points(Spacing::Linear);
        assert_eq!(lin, vec![1.0, 50.5, 100.0]);
        let log = a.points(Spacing::Log);
        assert_eq!(log[0], 1.0);
        assert!((log[1] - 10.0).abs() < 1e-12);
        assert_eq!(log[2], 100.0);
        assert_eq!(Axis::new(0.946, 0.946, 1).unwrap().points(Spacing::Log), vec![0.946]);
        assert!(Axis::new(1.0, 2.0, 1).is_err());
        assert!(Axis::new(2.0, 1.0, 5).is_err());
        assert!(Axis::new(1.0, 2.0, 0).is_err());
    }

    #[test]
    fn grid_validation() {
        let e = Axis::new(0.1, 1.0, 2).unwrap();
        assert!(GridSpec::new(e, Axis::new(0.0, 0.5, 2).unwrap(), Spacing::Linear).is_err());
        assert!(GridSpec::new(e, Axis::new(0.1, 1.0, 2).unwrap(), Spacing::Linear).is_err());
        assert!(GridSpec::new(Axis::new(-1.0, 1.0, 2).unwrap(), Axis::new(0.1, 0.5, 2).unwrap(), Spacing::Linear).is_err());
        let huge = Axis::new(0.1, 1.0, 20_000).unwrap();
        assert!(GridSpec::new(huge, Axis::new(0.1, 0.5, 20_000).unwrap(), Spacing::Linear).is_err());
    }

    #[test]
    fn surface_order_and_count() {
        let grid = GridSpec::new(
            Axis::new(0.1, 0.2, 2).unwrap(),
            Axis::new(0.01, 0.02, 2).unwrap(),
            Spacing::Linear,
        )
        .unwrap();
        let pts = evaluate_surface(SurfaceKind::R, &grid).unwrap();
        let coords: Vec<(Option<f64>, f64)> = pts.iter().map(|p| (p.epsilon, p.delta)).collect();
        assert_eq!(
            coords,
            vec![(Some(0.1), 0.01), (Some(0.2), 0.01), (Some(0.1), 0.02), (Some(0.2), 0.02)]
        );
        let rho = evaluate_surface(SurfaceKind::Rho, &grid).unwrap();
        assert_eq!(rho.len(), 2);
        assert!(rho.iter().all(|p| p.epsilon.is_none()));
    }

    #[test]
    fn g_surface_has_violations() {
        let grid = GridSpec::new(
            Axis::new(0.01, 1.0, 50).unwrap(),
            Axis::new(0.01, 0.99, 50).unwrap(),
            Spacing::Linear,
        )
        .unwrap();
        let pts = evaluate_surface(SurfaceKind::G, &grid).unwrap();
        assert_eq!(pts.len(), 2500);
        assert!(pts.iter().any(|p| p.violated));
        assert!(pts.iter().all(|p| p.violated == (p.value < 0.0)));
    }

    #[test]
    fn r_surface_below_crossover_is_clean() {
        let grid = GridSpec::new(
            Axis::new(0.01, 1.0, 40).unwrap(),
            Axis::new(1e-8, 0.9, 40).unwrap(),
            Spacing::Log,
        )
        .unwrap();
        let pts = evaluate_surface(SurfaceKind::R, &grid).unwrap();
        assert!(pts.iter().all(|p| !p.violated));
    }
}
