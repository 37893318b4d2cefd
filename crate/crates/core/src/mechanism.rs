//! Sampling from the calibrated Gaussian mechanism, `q(d) + σZ`.
//!
//! Variates come from a ChaCha20 stream seeded with a 64-bit seed and are
//! mapped through the inverse Gaussian CDF, so a given seed reproduces the
//! same output on every platform. Each call owns its generator.
//!
//! This is not hardened against floating-point side channels: the low-order
//! bits of a double-precision Gaussian variate can leak information about
//! the unperturbed value. Use a discrete or snapping mechanism where that
//! matters.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::calibrate::{self, Method, PrivacyParams, Sensitivity};
use crate::error::{domain, Result};
use crate::specfun::nquantile;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRequest {
    pub values: Vec<f64>,
    pub sigma: f64,
    /// Drawn from OS entropy when absent; the value used is reported back.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseOutput {
    pub noisy_values: Vec<f64>,
    pub sigma_used: f64,
    /// The calibration method, when σ came from one.
    pub method: Option<Method>,
    pub seed_used: u64,
    pub domain_warning: Option<String>,
}

/// Deterministic standard Gaussian stream.
pub struct GaussianStream {
    rng: ChaCha20Rng,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    /// Uniform on the open interval (0, 1), on a 2^-53 lattice offset by half a step.
    fn next_open_unit(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_standard(&mut self) -> f64 {
        nquantile(self.next_open_unit())
    }
}

/// Adds independent `N(0, σ²)` noise to every value.
pub fn sample_gaussian_mechanism(req: &NoiseRequest) -> Result<NoiseOutput> {
    if req.values.is_empty() {
        return Err(domain("no values to perturb"));
    }
    if !(req.sigma.is_finite() && req.sigma >= 0.0) {
        return Err(domain(format!("sigma must be finite and >= 0, got {}", req.sigma)));
    }
    if let Some(bad) = req.values.iter().find(|v| !v.is_finite()) {
        return Err(domain(format!("values must be finite, got {bad}")));
    }
    let seed = req.seed.unwrap_or_else(rand::random);
    let noisy_values = if req.sigma == 0.0 {
        req.values.clone()
    } else {
        let mut stream = GaussianStream::new(seed);
        req.values.iter().map(|v| v + req.sigma * stream.next_standard()).collect()
    };
    Ok(NoiseOutput {
        noisy_values,
        sigma_used: req.sigma,
        method: None,
        seed_used: seed,
        domain_warning: None,
    })
}

/// Calibrates σ with `method` and perturbs `values` with it.
pub fn calibrate_and_sample(
    params: &PrivacyParams,
    sens: Sensitivity,
    method: Method,
    values: &[f64],
    seed: Option<u64>,
) -> Result<NoiseOutput> {
    let cal = calibrate::calibrate(method, params, sens)?;
    let req = NoiseRequest { values: values.to_vec(), sigma: cal.sigma, seed };
    let out = sample_gaussian_mechanism(&req)?;
    Ok(NoiseOutput { method: Some(method), domain_warning: cal.domain_warning, ..out })
}
