//! Scalar Kalman filter over the inlier ratio of the current subset.
//!
//! The motion model mixes the running estimate with the subset prior only
//! when the estimator moves to a new subset:
//!
//! ```text
//! a      = alpha if switched else 1
//! mean'  = a * mean + (1 - a) * prior
//! var'   = a^2 * var + sigma_p^2
//! ```
//!
//! The update is the usual scalar correction with observation noise
//! `sigma_u^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    pub alpha: f64,
    pub sigma_p: f64,
    pub sigma_u: f64,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self { alpha: 0.5, sigma_p: 0.1, sigma_u: 0.1 }
    }
}

impl FilterParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        for (name, v) in [("sigma_p", self.sigma_p), ("sigma_u", self.sigma_u)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterState {
    pub epsilon: f64,
    pub variance: f64,
}

impl FilterState {
    /// Starts at the prior with the process-noise variance.
    pub fn new(prior: f64, params: &FilterParams) -> Self {
        Self { epsilon: prior.clamp(0.0, 1.0), variance: params.sigma_p * params.sigma_p }
    }

    /// Carries the estimate of the previous subset into a new one.
    pub fn reseeded(self, epsilon: f64) -> Self {
        Self { epsilon: epsilon.clamp(0.0, 1.0), ..self }
    }

    pub fn predict(self, prior: f64, subset_switched: bool, params: &FilterParams) -> Self {
        let a = if subset_switched { params.alpha } else { 1.0 };
        let b = 1.0 - a;
        Self {
            epsilon: (a * self.epsilon + b * prior).clamp(0.0, 1.0),
            variance: a * a * self.variance + params.sigma_p * params.sigma_p,
        }
    }

    pub fn update(self, observed: f64, params: &FilterParams) -> Self {
        let r = params.sigma_u * params.sigma_u;
        let gain = if self.variance > 0.0 { self.variance / (self.variance + r) } else { 0.0 };
        Self {
            epsilon: (self.epsilon + gain * (observed - self.epsilon)).clamp(0.0, 1.0),
            variance: (1.0 - gain) * self.variance,
        }
    }

    /// Kalman gain that [`FilterState::update`] would apply.
    pub fn gain(&self, params: &FilterParams) -> f64 {
        let r = params.sigma_u * params.sigma_u;
        if self.variance > 0.0 {
            self.variance / (self.variance + r)
        } else {
            0.0
        }
    }
}
