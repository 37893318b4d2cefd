//! Closed-form noise calibration for the Gaussian mechanism.
//!
//! Every bound here targets the classic sufficient condition
//! `Pr(|Z| > σε/Δ − Δ/(2σ)) ≤ δ`. From loosest to tightest (for a fixed
//! `(ε, δ, Δ)`):
//!
//! * [`simplified_sigma`]: `Δ√2/ε · √z + Δ/√(2ε)`
//! * [`closed_form_sigma`]: `Δ√2/(2ε) · (√z + √(z + ε))`
//! * [`optimal_sufficient_sigma`]: the exact minimiser of the condition,
//!   `Δ/(2ε) · (q + √(q² + 2ε))` with `q = Φ⁻¹(1 − δ/2)`
//!
//! where `z = −log(δ(2 − δ))`. All three are valid for every `ε > 0`.
//! [`standard_sigma`] is the older `Δ√2/ε · √log(5/(4δ))` bound, which only
//! holds for `ε < 1`; outside that range it is still computed but carries a
//! warning.
//!
//! Only scalar queries are handled. The same bounds apply to vector queries
//! under L2 sensitivity, but this crate does not model them.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::exact::{self, RootSolveConfig};
use crate::specfun;

const LN_5_OVER_4: f64 = 0.223_143_551_314_209_76;

/// Warning attached to standard-bound results with `ε ∉ (0, 1)`.
pub const EPSILON_RANGE_WARNING: &str = "epsilon outside (0,1): the standard bound is not guaranteed to be private";

/// Privacy parameters `(ε, δ)` with `ε > 0` finite and `0 < δ ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    epsilon: f64,
    delta: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(domain(format!("epsilon must be finite and > 0, got {epsilon}")));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(domain(format!("delta must be in (0,1], got {delta}")));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Global sensitivity `Δ ≥ 0` of a scalar query.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Sensitivity(f64);

impl Sensitivity {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(domain(format!("sensitivity must be finite and >= 0, got {value}")));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Calibration method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Standard,
    ClosedForm,
    Simplified,
    OptimalSufficient,
    AnalyticExact,
}

impl Method {
    /// All methods, loosest bound first.
    pub const ALL: [Method; 5] = [
        Method::Standard,
        Method::Simplified,
        Method::ClosedForm,
        Method::OptimalSufficient,
        Method::AnalyticExact,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Standard => "standard",
            Method::ClosedForm => "closed-form",
            Method::Simplified => "simplified",
            Method::OptimalSufficient => "optimal",
            Method::AnalyticExact => "analytic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Method::Standard),
            "closed-form" | "closed_form" => Ok(Method::ClosedForm),
            "simplified" => Ok(Method::Simplified),
            "optimal" | "optimal_sufficient" => Ok(Method::OptimalSufficient),
            "analytic" | "analytic_exact" => Ok(Method::AnalyticExact),
            other => Err(domain(format!("unknown calibration method '{other}'"))),
        }
    }
}

/// A calibrated noise scale.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub sigma: f64,
    pub method: Method,
    /// `z = −log(δ(2 − δ))`, set for the closed-form and simplified bounds.
    pub z_value: Option<f64>,
    pub domain_warning: Option<String>,
}

impl CalibrationResult {
    fn new(sigma: f64, method: Method) -> Self {
        Self { sigma, method, z_value: None, domain_warning: None }
    }
}

/// `z = −log(δ(2 − δ))` without underflow for tiny δ or cancellation near δ = 1.
pub(crate) fn z_of(delta: f64) -> f64 {
    if delta < 0.5 {
        -delta.ln() - (2.0 - delta).ln()
    } else {
        // δ(2 − δ) = 1 − (1 − δ)², and 1 − δ is exact here
        let u = 1.0 - delta;
        -(-(u * u)).ln_1p()
    }
}

/// `log(5/(4δ))`.
pub(crate) fn log_5_over_4delta(delta: f64) -> f64 {
    LN_5_OVER_4 - delta.ln()
}

fn require_delta_below_one(params: &PrivacyParams, method: Method) -> Result<()> {
    if params.delta >= 1.0 {
        return Err(domain(format!("delta must be in (0,1) for {method}")));
    }
    Ok(())
}

/// The standard bound `σ = Δ√2/ε · √log(5/(4δ))`, treated as non-strict.
///
/// Requires `δ < 1`. For `ε ≥ 1` the value is still returned, with
/// `domain_warning` set.
pub fn standard_sigma(params: &PrivacyParams, sens: Sensitivity) -> Result<CalibrationResult> {
    require_delta_below_one(params, Method::Standard)?;
    let eps = params.epsilon;
    let sigma = sens.0 * SQRT_2 / eps * log_5_over_4delta(params.delta).sqrt();
    let mut out = CalibrationResult::new(sigma, Method::Standard);
    if eps >= 1.0 {
        out.domain_warning = Some(EPSILON_RANGE_WARNING.to_string());
    }
    Ok(out)
}

/// `σ = Δ√2/(2ε) · (√z + √(z + ε))`, valid for all `ε > 0` and `0 < δ ≤ 1`.
pub fn closed_form_sigma(params: &PrivacyParams, sens: Sensitivity) -> Result<CalibrationResult> {
    let eps = params.epsilon;
    let z = z_of(params.delta);
    let sigma = sens.0 * SQRT_2 / (2.0 * eps) * (z.sqrt() + (z + eps).sqrt());
    Ok(CalibrationResult {
        z_value: Some(z),
        ..CalibrationResult::new(sigma, Method::ClosedForm)
    })
}

/// `σ = Δ√2/ε · √z + Δ/√(2ε)`; never smaller than [`closed_form_sigma`].
pub fn simplified_sigma(params: &PrivacyParams, sens: Sensitivity) -> Result<CalibrationResult> {
    let eps = params.epsilon;
    let z = z_of(params.delta);
    let sigma = sens.0 * SQRT_2 / eps * z.sqrt() + sens.0 / (2.0 * eps).sqrt();
    Ok(CalibrationResult {
        z_value: Some(z),
        ..CalibrationResult::new(sigma, Method::Simplified)
    })
}

/// The smallest σ meeting the sufficient condition,
/// `Δ/(2ε) · (q + √(q² + 2ε))` with `q = Φ⁻¹(1 − δ/2)`. Requires `δ < 1`.
pub fn optimal_sufficient_sigma(
    params: &PrivacyParams,
    sens: Sensitivity,
) -> Result<CalibrationResult> {
    require_delta_below_one(params, Method::OptimalSufficient)?;
    let eps = params.epsilon;
    let q = specfun::std_normal_upper_quantile(0.5 * params.delta)?;
    let sigma = sens.0 / (2.0 * eps) * (q + (q * q + 2.0 * eps).sqrt());
    Ok(CalibrationResult::new(sigma, Method::OptimalSufficient))
}

/// ε implied by the standard bound for a given σ, with a flag for results outside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardEpsilon {
    pub epsilon: f64,
    /// Set when `epsilon ≥ 1`, where the standard bound gives no guarantee.
    pub out_of_range: bool,
}

/// Inverts the standard bound: `ε(δ, σ, Δ) = Δ√2/σ · √log(5/(4δ))`.
pub fn epsilon_from_sigma_standard(
    delta: f64,
    sigma: f64,
    sens: Sensitivity,
) -> Result<StandardEpsilon> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("delta must be in (0,1), got {delta}")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(domain(format!("sigma must be finite and > 0, got {sigma}")));
    }
    let epsilon = sens.0 * SQRT_2 / sigma * log_5_over_4delta(delta).sqrt();
    Ok(StandardEpsilon { epsilon, out_of_range: epsilon >= 1.0 })
}

/// `Δ/√(2ε)`: no σ satisfying the sufficient condition with `δ < 1` reaches this value.
pub fn sigma_floor(params: &PrivacyParams, sens: Sensitivity) -> f64 {
    sens.0 / (2.0 * params.epsilon).sqrt()
}

/// Dispatches to the calibration routine for `method`. The analytic method
/// uses [`exact::solve_analytic_sigma`] with the default solver settings.
pub fn calibrate(
    method: Method,
    params: &PrivacyParams,
    sens: Sensitivity,
) -> Result<CalibrationResult> {
    match method {
        Method::Standard => standard_sigma(params, sens),
        Method::ClosedForm => closed_form_sigma(params, sens),
        Method::Simplified => simplified_sigma(params, sens),
        Method::OptimalSufficient => optimal_sufficient_sigma(params, sens),
        Method::AnalyticExact => {
            exact::solve_analytic_sigma(params, sens, &RootSolveConfig::default())
        }
    }
}
