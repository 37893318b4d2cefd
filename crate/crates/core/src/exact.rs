//! Numerical ground truth: the sufficient-condition tail probability, the
//! exact (necessary and sufficient) Gaussian-mechanism privacy condition, and
//! bisection solvers for the smallest σ meeting each.

use crate::calibrate::{self, CalibrationResult, Method, PrivacyParams, Sensitivity};
use crate::error::{domain, Error, Result};
use crate::specfun::{self, Probability};

/// Bracket doublings/halvings tried before giving up on a sign change.
const MAX_EXPANSIONS: usize = 60;

/// Settings for the bisection solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolveConfig {
    /// Stop when the bracket width is below `rel_tol * hi`.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Initial lower end of the σ bracket; defaults to `Δ/√(2ε)`.
    pub bracket_lo: Option<f64>,
    /// Initial upper end of the σ bracket; defaults to ten times the closed-form bound.
    pub bracket_hi: Option<f64>,
}

impl Default for RootSolveConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_iter: 200, bracket_lo: None, bracket_hi: None }
    }
}

impl RootSolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(domain(format!("rel_tol must be in (0,1), got {}", self.rel_tol)));
        }
        if self.max_iter < 1 {
            return Err(domain("max_iter must be at least 1"));
        }
        for b in [self.bracket_lo, self.bracket_hi].into_iter().flatten() {
            if !(b.is_finite() && b > 0.0) {
                return Err(domain(format!("bracket ends must be finite and > 0, got {b}")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.bracket_lo, self.bracket_hi) {
            if lo >= hi {
                return Err(domain(format!("bracket_lo must be < bracket_hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

fn check_sigma_and_sensitivity(sigma: f64, sens: Sensitivity) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(domain(format!("sigma must be finite and > 0, got {sigma}")));
    }
    if sens.value() <= 0.0 {
        return Err(domain("sensitivity must be > 0"));
    }
    Ok(())
}

fn v_raw(sigma: f64, eps: f64, delta_q: f64) -> f64 {
    sigma * eps / delta_q - delta_q / (2.0 * sigma)
}

/// `v(σ) = σε/Δ − Δ/(2σ)`, strictly increasing in σ.
pub fn v_threshold(sigma: f64, params: &PrivacyParams, sens: Sensitivity) -> Result<f64> {
    check_sigma_and_sensitivity(sigma, sens)?;
    Ok(v_raw(sigma, params.epsilon(), sens.value()))
}

fn suffcrit_raw(sigma: f64, eps: f64, delta_q: f64) -> f64 {
    let v = v_raw(sigma, eps, delta_q);
    if v <= 0.0 {
        1.0
    } else {
        2.0 * specfun::ncdf(-v)
    }
}

/// `l(σ) = Pr(|Z| > v(σ))`: 1 when `v(σ) ≤ 0`, otherwise `2(1 − Φ(v))`.
pub fn suffcrit_probability(
    sigma: f64,
    params: &PrivacyParams,
    sens: Sensitivity,
) -> Result<Probability> {
    check_sigma_and_sensitivity(sigma, sens)?;
    Probability::new(suffcrit_raw(sigma, params.epsilon(), sens.value()))
}

pub(crate) fn balle_lhs_raw(sigma: f64, eps: f64, delta_q: f64) -> f64 {
    let a = delta_q / (2.0 * sigma);
    let b = eps * sigma / delta_q;
    // e^ε Φ(−a − b) in log space so large ε cannot overflow before the subtraction
    let second = (eps + specfun::log_ncdf(-a - b)).exp();
    specfun::ncdf(a - b) - second
}

/// Left side of the exact privacy condition:
/// `Φ(Δ/(2σ) − εσ/Δ) − e^ε Φ(−Δ/(2σ) − εσ/Δ)`.
///
/// The mechanism is `(ε, δ)`-private exactly when this is at most δ.
pub fn balle_lhs(sigma: f64, params: &PrivacyParams, sens: Sensitivity) -> Result<f64> {
    check_sigma_and_sensitivity(sigma, sens)?;
    Ok(balle_lhs_raw(sigma, params.epsilon(), sens.value()))
}

/// Smallest σ with `f(σ) ≤ target` for a decreasing `f`.
///
/// The bracket is widened geometrically until `f(lo) > target ≥ f(hi)`;
/// returns the upper end of the final bracket so the condition holds there.
fn bisect_decreasing<F>(f: F, target: f64, mut lo: f64, mut hi: f64, cfg: &RootSolveConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut n = 0;
    while f(lo) <= target && n < MAX_EXPANSIONS {
        hi = hi.min(lo);
        lo *= 0.5;
        n += 1;
    }
    n = 0;
    while f(hi) > target && n < MAX_EXPANSIONS {
        lo = lo.max(hi);
        hi *= 2.0;
        n += 1;
    }
    if !(f(lo) > target && f(hi) <= target) {
        return Err(Error::Bracket { lo, hi });
    }
    for _ in 0..cfg.max_iter {
        if hi - lo <= cfg.rel_tol * hi {
            return Ok(hi);
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= cfg.rel_tol * hi {
        Ok(hi)
    } else {
        Err(Error::NoConvergence(cfg.max_iter))
    }
}

fn solver_inputs(
    params: &PrivacyParams,
    sens: Sensitivity,
    cfg: &RootSolveConfig,
    method: Method,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    if params.delta() >= 1.0 {
        return Err(domain(format!("delta must be in (0,1) for {method}")));
    }
    let lo = cfg.bracket_lo.unwrap_or_else(|| calibrate::sigma_floor(params, sens));
    let hi = match cfg.bracket_hi {
        Some(hi) => hi,
        None => 10.0 * calibrate::closed_form_sigma(params, sens)?.sigma,
    };
    Ok((lo, hi))
}

/// Solves `l(σ) = δ` by bisection. Agrees with
/// [`calibrate::optimal_sufficient_sigma`] without sharing its quantile route.
pub fn solve_sufficient_sigma(
    params: &PrivacyParams,
    sens: Sensitivity,
    cfg: &RootSolveConfig,
) -> Result<f64> {
    let (lo, hi) = solver_inputs(params, sens, cfg, Method::OptimalSufficient)?;
    if sens.value() == 0.0 {
        return Ok(0.0);
    }
    let (eps, dq) = (params.epsilon(), sens.value());
    bisect_decreasing(|s| suffcrit_raw(s, eps, dq), params.delta(), lo, hi, cfg)
}

/// The smallest σ meeting the exact privacy condition `balle_lhs(σ) ≤ δ`.
///
/// Monotonicity of the left side is not assumed globally: the solver only
/// bisects across a verified sign change and reports [`Error::Bracket`]
/// otherwise.
pub fn solve_analytic_sigma(
    params: &PrivacyParams,
    sens: Sensitivity,
    cfg: &RootSolveConfig,
) -> Result<CalibrationResult> {
    let (lo, hi) = solver_inputs(params, sens, cfg, Method::AnalyticExact)?;
    let sigma = if sens.value() == 0.0 {
        0.0
    } else {
        let (eps, dq) = (params.epsilon(), sens.value());
        bisect_decreasing(|s| balle_lhs_raw(s, eps, dq), params.delta(), lo, hi, cfg)?
    };
    Ok(CalibrationResult {
        sigma,
        method: Method::AnalyticExact,
        z_value: None,
        domain_warning: None,
    })
}
