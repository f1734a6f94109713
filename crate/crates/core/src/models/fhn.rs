//! FitzHugh--Nagumo model.
//!
//! Fast/slow pair with a cubic fast branch:
//!
//! ```text
//! eps v̇ = -f(v) - w + i,      f(v) = (1 - v)(v - v_b) v
//!     ẇ = v - gamma w
//! ```
//!
//! `eps` plays the role of the capacitance in the energy balance, so the
//! stored energy at the clamp endpoint is `eps v(0)^2 / 2` and the injected
//! current reconstructs as `i = eps v̇ + f(v) + w`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FhnParams {
    /// Fast timescale separation (dimensionless, > 0).
    pub epsilon: f64,
    /// Recovery leak rate (dimensionless, >= 0).
    pub gamma: f64,
    /// Middle root of the cubic, 0 < v_b < 1.
    pub v_b: f64,
}

impl FhnParams {
    pub fn new(epsilon: f64, gamma: f64, v_b: f64) -> Result<Self> {
        let p = Self {
            epsilon,
            gamma,
            v_b,
        };
        p.validate()?;
        Ok(p)
    }

    /// Nullcline-calibrated defaults: v_b = 0.4, gamma = 0.5, eps = 0.01.
    pub fn calibrated() -> Self {
        Self {
            epsilon: 0.01,
            gamma: 0.5,
            v_b: 0.4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be nonnegative, got {}",
                self.gamma
            )));
        }
        if !(self.v_b > 0.0 && self.v_b < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "v_b must lie in (0, 1), got {}",
                self.v_b
            )));
        }
        Ok(())
    }
}

/// Cubic fast branch `(1 - v)(v - v_b) v`.
///
/// Note the sign: with this convention the branch is negative on `(0, v_b)`
/// and positive on `(v_b, 1)`, the mirror image of the N-shaped RC resistor.
pub fn fhn_cubic(p: &FhnParams, v: f64) -> f64 {
    (1.0 - v) * (v - p.v_b) * v
}

/// Recovery derivative `ẇ = v - gamma w`.
pub fn recovery_derivative(p: &FhnParams, v: f64, w: f64) -> f64 {
    v - p.gamma * w
}
