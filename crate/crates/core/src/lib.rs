//! Noise calibration for the Gaussian mechanism of `(ε, δ)`-differential privacy.
//!
//! * [`specfun`]: erf, Gaussian cdf/pdf/quantile and a closed-form quantile bound.
//! * [`calibrate`]: closed-form σ bounds (standard, closed-form, simplified,
//!   optimal sufficient) and the ε-from-σ inversion.
//! * [`exact`]: tail probability of the sufficient condition, the exact
//!   privacy condition, and bisection solvers for both.
//! * [`analysis`]: comparison surfaces between the standard and closed-form bounds.
//! * [`mechanism`]: seeded sampling of `q(d) + σZ`.
//! * [`cli`]: the `gaussmech` command-line front end.
//!
//! ```
//! use gaussmech::{closed_form_sigma, PrivacyParams, Sensitivity};
//!
//! let params = PrivacyParams::new(1.0, 1e-5).unwrap();
//! let sigma = closed_form_sigma(&params, Sensitivity::new(1.0).unwrap()).unwrap().sigma;
//! assert!((sigma - 4.756944246387276).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod calibrate;
pub mod cli;
pub mod error;
pub mod exact;
pub mod mechanism;
pub mod specfun;

pub use analysis::{
    crossover_epsilon, d_value, evaluate_surface, g_value, ratio_r, ratio_r_deps, rho_value,
    w_value, Axis, GridSpec, Spacing, SurfaceKind, SurfacePoint,
};
pub use calibrate::{
    calibrate, closed_form_sigma, epsilon_from_sigma_standard, optimal_sufficient_sigma,
    sigma_floor, simplified_sigma, standard_sigma, CalibrationResult, Method, PrivacyParams,
    Sensitivity, StandardEpsilon,
};
pub use error::{Error, Result};
pub use exact::{
    balle_lhs, solve_analytic_sigma, solve_sufficient_sigma, suffcrit_probability, v_threshold,
    RootSolveConfig,
};
pub use mechanism::{calibrate_and_sample, sample_gaussian_mechanism, NoiseOutput, NoiseRequest};
pub use specfun::Probability;
