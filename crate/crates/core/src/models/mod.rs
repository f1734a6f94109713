//! The four circuit models and their current laws, as pure functions of
//! state and voltage.

pub mod fhn;
pub mod hh;
pub mod rc;

use serde::{Deserialize, Serialize};

pub use fhn::{fhn_cubic, recovery_derivative, FhnParams};
pub use hh::{
    fastest_gate_time_constant, gating_derivatives, hh_rates, steady_gates, GateRates, GatingState,
    HhParams, HhRates,
};
pub use rc::{
    cubic_current, cubic_current_primitive, cubic_slope, CubicResistorParams, LinearRcParams,
};

use crate::error::{Error, Result};

/// Maximum number of internal state components across all models
/// (HH gating triple).
pub const MAX_STATE_DIM: usize = 3;

/// Maximum number of resistive/ionic branches across all models
/// (HH: sodium, potassium, leak).
pub const MAX_BRANCHES: usize = 3;

/// Tagged union over the four circuit models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ModelSpec {
    LinearRc(LinearRcParams),
    CubicRc {
        capacitance: f64,
        #[serde(flatten)]
        resistor: CubicResistorParams,
    },
    Fhn(FhnParams),
    Hh(HhParams),
}

/// Internal state carried alongside the forced voltage: nothing for the RC
/// circuits, the recovery variable for FHN, the gating triple for HH.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelState {
    Empty,
    Recovery(f64),
    Gating(GatingState),
}

impl ModelState {
    fn shape_name(&self) -> &'static str {
        match self {
            ModelState::Empty => "empty",
            ModelState::Recovery(_) => "recovery scalar",
            ModelState::Gating(_) => "gating triple",
        }
    }

    /// Flattens into a fixed-size array for the integrator; unused
    /// components stay zero.
    pub fn to_array(&self) -> [f64; MAX_STATE_DIM] {
        match *self {
            ModelState::Empty => [0.0; MAX_STATE_DIM],
            ModelState::Recovery(w) => [w, 0.0, 0.0],
            ModelState::Gating(g) => [g.m, g.h, g.n],
        }
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::LinearRc(p) => p.validate(),
            ModelSpec::CubicRc {
                capacitance,
                resistor,
            } => {
                if !(*capacitance > 0.0) || !capacitance.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "capacitance must be positive, got {capacitance}"
                    )));
                }
                resistor.validate()
            }
            ModelSpec::Fhn(p) => p.validate(),
            ModelSpec::Hh(p) => p.validate(),
        }
    }

    /// Coefficient of `v̇` in the circuit equation (the capacitance; for
    /// FHN the timescale separation plays that role).
    pub fn capacitance(&self) -> f64 {
        match self {
            ModelSpec::LinearRc(p) => p.capacitance,
            ModelSpec::CubicRc { capacitance, .. } => *capacitance,
            ModelSpec::Fhn(p) => p.epsilon,
            ModelSpec::Hh(p) => p.capacitance,
        }
    }

    /// Number of internal state components integrated under clamp.
    pub fn state_dim(&self) -> usize {
        match self {
            ModelSpec::LinearRc(_) | ModelSpec::CubicRc { .. } => 0,
            ModelSpec::Fhn(_) => 1,
            ModelSpec::Hh(_) => 3,
        }
    }

    pub fn branch_labels(&self) -> &'static [&'static str] {
        match self {
            ModelSpec::LinearRc(_) => &["resistor"],
            ModelSpec::CubicRc { .. } => &["resistor"],
            ModelSpec::Fhn(_) => &["cubic", "recovery"],
            ModelSpec::Hh(_) => &["i_na", "i_k", "i_l"],
        }
    }

    /// Checks that a state value has the shape this model expects.
    pub fn check_state(&self, state: &ModelState) -> Result<()> {
        let ok = matches!(
            (self, state),
            (ModelSpec::LinearRc(_), ModelState::Empty)
                | (ModelSpec::CubicRc { .. }, ModelState::Empty)
                | (ModelSpec::Fhn(_), ModelState::Recovery(_))
                | (ModelSpec::Hh(_), ModelState::Gating(_))
        );
        if ok {
            Ok(())
        } else {
            Err(Error::StateShape {
                expected: match self {
                    ModelSpec::LinearRc(_) | ModelSpec::CubicRc { .. } => "empty",
                    ModelSpec::Fhn(_) => "recovery scalar",
                    ModelSpec::Hh(_) => "gating triple",
                },
                got: state.shape_name(),
            })
        }
    }

    /// Total resistive/ionic current at voltage `v` with internal state `g`.
    pub fn ionic_current_total(&self, v: f64, state: &ModelState) -> Result<f64> {
        self.check_state(state)?;
        let mut branches = [0.0; MAX_BRANCHES];
        let n = self.branch_currents_raw(v, &state.to_array(), &mut branches);
        Ok(branches[..n].iter().sum())
    }

    /// Branch currents written into `out`; returns the branch count.
    /// `state` is the flattened internal state.
    pub(crate) fn branch_currents_raw(
        &self,
        v: f64,
        state: &[f64; MAX_STATE_DIM],
        out: &mut [f64; MAX_BRANCHES],
    ) -> usize {
        match self {
            ModelSpec::LinearRc(p) => {
                out[0] = p.resistor_current(v);
                1
            }
            ModelSpec::CubicRc { resistor, .. } => {
                out[0] = cubic_current(resistor, v);
                1
            }
            ModelSpec::Fhn(p) => {
                out[0] = fhn_cubic(p, v);
                out[1] = state[0];
                2
            }
            ModelSpec::Hh(p) => {
                let g = GatingState {
                    m: state[0],
                    h: state[1],
                    n: state[2],
                };
                let (i_na, i_k, i_l) = p.branch_currents(v, &g);
                out[0] = i_na;
                out[1] = i_k;
                out[2] = i_l;
                3
            }
        }
    }

    /// Time derivative of the flattened internal state at forced voltage `v`.
    pub(crate) fn state_derivative_raw(
        &self,
        v: f64,
        state: &[f64; MAX_STATE_DIM],
    ) -> [f64; MAX_STATE_DIM] {
        match self {
            ModelSpec::LinearRc(_) | ModelSpec::CubicRc { .. } => [0.0; MAX_STATE_DIM],
            ModelSpec::Fhn(p) => [recovery_derivative(p, v, state[0]), 0.0, 0.0],
            ModelSpec::Hh(_) => {
                let g = GatingState {
                    m: state[0],
                    h: state[1],
                    n: state[2],
                };
                let d = gating_derivatives(v, &g);
                [d.m, d.h, d.n]
            }
        }
    }

    /// Equilibrium internal state under a held voltage `v`.
    ///
    /// For FHN this is the recovery nullcline `w = v / gamma`; a held
    /// nonzero voltage has no equilibrium when `gamma = 0`.
    pub fn steady_state(&self, v: f64) -> ModelState {
        match self {
            ModelSpec::LinearRc(_) | ModelSpec::CubicRc { .. } => ModelState::Empty,
            ModelSpec::Fhn(p) => {
                if p.gamma == 0.0 {
                    assert!(
                        v == 0.0,
                        "FHN recovery has no equilibrium for held v != 0 when gamma = 0"
                    );
                    ModelState::Recovery(0.0)
                } else {
                    ModelState::Recovery(v / p.gamma)
                }
            }
            ModelSpec::Hh(_) => ModelState::Gating(steady_gates(v)),
        }
    }

    /// Fastest internal timescale over the voltage band `[v_lo, v_hi]`,
    /// used to cap the clamp integration step. Infinite when the model has
    /// no internal dynamics faster than the forcing (the grid builder then
    /// falls back to the ansatz rates alone).
    pub fn fastest_time_constant(&self, v_lo: f64, v_hi: f64) -> f64 {
        match self {
            ModelSpec::LinearRc(p) => p.resistance * p.capacitance,
            ModelSpec::CubicRc {
                capacitance,
                resistor,
            } => {
                // local relaxation rate |f'(v)| / C, scanned over the band
                let steps = 64;
                let mut max_slope = 0.0_f64;
                for j in 0..=steps {
                    let v = v_lo + (v_hi - v_lo) * j as f64 / steps as f64;
                    max_slope = max_slope.max(cubic_slope(resistor, v).abs());
                }
                if max_slope == 0.0 {
                    f64::INFINITY
                } else {
                    capacitance / max_slope
                }
            }
            ModelSpec::Fhn(p) => {
                if p.gamma > 0.0 {
                    1.0 / p.gamma
                } else {
                    f64::INFINITY
                }
            }
            ModelSpec::Hh(_) => fastest_gate_time_constant(v_lo, v_hi),
        }
    }
}
