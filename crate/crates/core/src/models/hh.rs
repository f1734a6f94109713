//! Hodgkin--Huxley squid-axon model, 1952 kinetics.
//!
//! Voltages follow the deviation-from-rest convention: rest sits at
//! `v = 0 mV` and depolarization is positive. Membrane equation and ionic
//! currents:
//!
//! ```text
//! C v̇ = -i_Na - i_K - i_L + i
//! i_Na = g_Na m^3 h (v - v_Na)
//! i_K  = g_K  n^4   (v - v_K)
//! i_L  = g_L        (v - v_L)
//! ```
//!
//! Gating kinetics `tau_x(v) ẋ = -x + x_inf(v)` with the original rate
//! functions:
//!
//! ```text
//! alpha_m = 0.1 (25 - v) / (exp((25 - v)/10) - 1)     beta_m = 4 exp(-v/18)
//! alpha_h = 0.07 exp(-v/20)                           beta_h = 1 / (exp((30 - v)/10) + 1)
//! alpha_n = 0.01 (10 - v) / (exp((10 - v)/10) - 1)    beta_n = 0.125 exp(-v/80)
//! ```
//!
//! `alpha_m` and `alpha_n` have removable singularities at v = 25 and v = 10;
//! both are evaluated through a guarded ratio that switches to the series
//! limit for tiny arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard maximal conductances (mS/cm^2) and reversal potentials (mV).
pub const STANDARD_C: f64 = 1.0;
pub const STANDARD_G_NA: f64 = 120.0;
pub const STANDARD_G_K: f64 = 36.0;
pub const STANDARD_G_LEAK: f64 = 0.3;
pub const STANDARD_V_NA: f64 = 115.0;
pub const STANDARD_V_K: f64 = -12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HhParams {
    /// Membrane capacitance (uF/cm^2).
    pub capacitance: f64,
    pub g_na: f64,
    pub g_k: f64,
    pub g_leak: f64,
    pub v_na: f64,
    pub v_k: f64,
    pub v_leak: f64,
}

impl HhParams {
    /// Standard 1952 parameters with the leak reversal calibrated so that
    /// the total ionic current vanishes at rest (v = 0, steady-state gates).
    pub fn standard() -> Self {
        Self::with_calibrated_leak(
            STANDARD_C,
            STANDARD_G_NA,
            STANDARD_G_K,
            STANDARD_G_LEAK,
            STANDARD_V_NA,
            STANDARD_V_K,
        )
    }

    /// Builds parameters with `v_leak` solved from the rest condition
    /// `i_Na(0) + i_K(0) + g_L (0 - v_leak) = 0` at steady-state gates.
    pub fn with_calibrated_leak(
        capacitance: f64,
        g_na: f64,
        g_k: f64,
        g_leak: f64,
        v_na: f64,
        v_k: f64,
    ) -> Self {
        let g = steady_gates(0.0);
        let i_na = g_na * g.m.powi(3) * g.h * (0.0 - v_na);
        let i_k = g_k * g.n.powi(4) * (0.0 - v_k);
        let v_leak = (i_na + i_k) / g_leak;
        Self {
            capacitance,
            g_na,
            g_k,
            g_leak,
            v_na,
            v_k,
            v_leak,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("capacitance", self.capacitance),
            ("g_na", self.g_na),
            ("g_k", self.g_k),
            ("g_leak", self.g_leak),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if !(self.v_k < 0.0 && 0.0 < self.v_leak && self.v_leak < self.v_na) {
            return Err(Error::InvalidParameter(format!(
                "reversal potentials must satisfy v_K < 0 < v_L < v_Na, got ({}, {}, {})",
                self.v_k, self.v_leak, self.v_na
            )));
        }
        Ok(())
    }

    /// Total ionic current at voltage `v` with gates `g`.
    pub fn ionic_current(&self, v: f64, g: &GatingState) -> f64 {
        let (i_na, i_k, i_l) = self.branch_currents(v, g);
        i_na + i_k + i_l
    }

    /// Sodium, potassium and leak branch currents.
    pub fn branch_currents(&self, v: f64, g: &GatingState) -> (f64, f64, f64) {
        let i_na = self.g_na * g.m.powi(3) * g.h * (v - self.v_na);
        let i_k = self.g_k * g.n.powi(4) * (v - self.v_k);
        let i_l = self.g_leak * (v - self.v_leak);
        (i_na, i_k, i_l)
    }
}

/// Gating triple with each component in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GatingState {
    pub m: f64,
    pub h: f64,
    pub n: f64,
}

impl GatingState {
    pub fn in_bounds(&self, slack: f64) -> bool {
        [self.m, self.h, self.n]
            .iter()
            .all(|x| (-slack..=1.0 + slack).contains(x))
    }
}

/// Forward rate, backward rate, time constant and steady-state activation
/// of one gate at a fixed voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateRates {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub x_inf: f64,
}

impl GateRates {
    fn from_alpha_beta(alpha: f64, beta: f64) -> Self {
        let sum = alpha + beta;
        Self {
            alpha,
            beta,
            tau: 1.0 / sum,
            x_inf: alpha / sum,
        }
    }
}

/// Rates of all three gates at a fixed voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HhRates {
    pub m: GateRates,
    pub h: GateRates,
    pub n: GateRates,
}

/// `x / (exp(x) - 1)` with the removable singularity at x = 0 evaluated by
/// its series; the guard kicks in for |x| < 1e-7 where the first-order term
/// already reaches full precision.
fn expm1_ratio(x: f64) -> f64 {
    if x.abs() < 1e-7 {
        1.0 - x / 2.0
    } else {
        x / x.exp_m1()
    }
}

/// Gating rate functions at voltage `v` (mV, deviation from rest).
pub fn hh_rates(v: f64) -> HhRates {
    let alpha_m = expm1_ratio((25.0 - v) / 10.0);
    let beta_m = 4.0 * (-v / 18.0).exp();
    let alpha_h = 0.07 * (-v / 20.0).exp();
    let beta_h = 1.0 / (((30.0 - v) / 10.0).exp() + 1.0);
    let alpha_n = 0.1 * expm1_ratio((10.0 - v) / 10.0);
    let beta_n = 0.125 * (-v / 80.0).exp();
    HhRates {
        m: GateRates::from_alpha_beta(alpha_m, beta_m),
        h: GateRates::from_alpha_beta(alpha_h, beta_h),
        n: GateRates::from_alpha_beta(alpha_n, beta_n),
    }
}

/// Steady-state gating triple at voltage `v`.
pub fn steady_gates(v: f64) -> GatingState {
    let r = hh_rates(v);
    GatingState {
        m: r.m.x_inf,
        h: r.h.x_inf,
        n: r.n.x_inf,
    }
}

/// Relaxation derivatives `(x_inf(v) - x) / tau_x(v)` componentwise.
pub fn gating_derivatives(v: f64, g: &GatingState) -> GatingState {
    let r = hh_rates(v);
    GatingState {
        m: (r.m.x_inf - g.m) / r.m.tau,
        h: (r.h.x_inf - g.h) / r.h.tau,
        n: (r.n.x_inf - g.n) / r.n.tau,
    }
}

/// Smallest gating time constant over the voltage interval `[v_lo, v_hi]`,
/// scanned at 0.25 mV resolution. `beta_m` grows exponentially under
/// hyperpolarization, so the result depends strongly on `v_lo`.
pub fn fastest_gate_time_constant(v_lo: f64, v_hi: f64) -> f64 {
    debug_assert!(v_lo <= v_hi);
    let steps = (((v_hi - v_lo) / 0.25).ceil() as usize).max(1);
    let mut tau_min = f64::INFINITY;
    for j in 0..=steps {
        let v = v_lo + (v_hi - v_lo) * j as f64 / steps as f64;
        let r = hh_rates(v);
        tau_min = tau_min.min(r.m.tau).min(r.h.tau).min(r.n.tau);
    }
    tau_min
}
