//! Linear and bistable (cubic-resistor) RC circuits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear RC circuit: `C v̇ = -v/R + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearRcParams {
    pub capacitance: f64,
    pub resistance: f64,
}

impl LinearRcParams {
    pub fn new(capacitance: f64, resistance: f64) -> Result<Self> {
        let p = Self {
            capacitance,
            resistance,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacitance > 0.0) || !self.capacitance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "capacitance must be positive, got {}",
                self.capacitance
            )));
        }
        if !(self.resistance > 0.0) || !self.resistance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "resistance must be positive, got {}",
                self.resistance
            )));
        }
        Ok(())
    }

    /// Resistive current `v / R`.
    pub fn resistor_current(&self, v: f64) -> f64 {
        v / self.resistance
    }
}

/// N-shaped cubic resistor with roots `v_a < v_b < v_c` and leading
/// coefficient `k > 0`.
///
/// The branch current is `k (v - v_a)(v - v_b)(v - v_c)`: positive on
/// `(v_a, v_b)` (dissipative below the middle root) and negative on
/// `(v_b, v_c)` (the energy-extracting band).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicResistorParams {
    pub v_a: f64,
    pub v_b: f64,
    pub v_c: f64,
    pub k: f64,
}

impl CubicResistorParams {
    pub fn new(v_a: f64, v_b: f64, v_c: f64, k: f64) -> Result<Self> {
        let p = Self { v_a, v_b, v_c, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_a < self.v_b && self.v_b < self.v_c) {
            return Err(Error::InvalidParameter(format!(
                "cubic roots must be strictly ordered, got ({}, {}, {})",
                self.v_a, self.v_b, self.v_c
            )));
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cubic leading coefficient must be positive, got {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// Cubic branch current `k (v - v_a)(v - v_b)(v - v_c)`.
pub fn cubic_current(p: &CubicResistorParams, v: f64) -> f64 {
    p.k * (v - p.v_a) * (v - p.v_b) * (v - p.v_c)
}

/// Antiderivative of the cubic branch current, normalized so that it
/// vanishes at `v = 0`. Used by the two-phase hold-supply oracle.
pub fn cubic_current_primitive(p: &CubicResistorParams, v: f64) -> f64 {
    let s1 = p.v_a + p.v_b + p.v_c;
    let s2 = p.v_a * p.v_b + p.v_a * p.v_c + p.v_b * p.v_c;
    let s3 = p.v_a * p.v_b * p.v_c;
    p.k * (v.powi(4) / 4.0 - s1 * v.powi(3) / 3.0 + s2 * v * v / 2.0 - s3 * v)
}

/// Slope of the cubic characteristic, `d i_d / dv`.
pub fn cubic_slope(p: &CubicResistorParams, v: f64) -> f64 {
    let (a, b, c) = (p.v_a, p.v_b, p.v_c);
    p.k * ((v - b) * (v - c) + (v - a) * (v - c) + (v - a) * (v - b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3_cubic() -> CubicResistorParams {
        CubicResistorParams::new(0.0, 2.0, 4.0, 1.0).unwrap()
    }

    #[test]
    fn cubic_vanishes_at_roots() {
        let p = fig3_cubic();
        assert_eq!(cubic_current(&p, 0.0), 0.0);
        assert_eq!(cubic_current(&p, 2.0), 0.0);
        assert_eq!(cubic_current(&p, 4.0), 0.0);
    }

    #[test]
    fn cubic_matches_expanded_polynomial() {
        // roots (0, 2, 4), k = 1  =>  v^3 - 6 v^2 + 8 v
        let p = fig3_cubic();
        assert_eq!(cubic_current(&p, 1.0), 3.0);
        assert_eq!(cubic_current(&p, 3.0), -3.0);
        for &v in &[-1.5, 0.25, 1.9, 2.7, 3.99, 5.5] {
            let expanded = v * v * v - 6.0 * v * v + 8.0 * v;
            assert!((cubic_current(&p, v) - expanded).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_sign_bands() {
        let p = fig3_cubic();
        // negative left of v_a, positive on (v_a, v_b), negative on
        // (v_b, v_c), positive beyond v_c
        assert!(cubic_current(&p, -0.5) < 0.0);
        assert!(cubic_current(&p, 1.0) > 0.0);
        assert!(cubic_current(&p, 3.0) < 0.0);
        assert!(cubic_current(&p, 4.5) > 0.0);
        // left equilibrium stable under i = 0: f'(v_a) > 0
        assert!(cubic_slope(&p, p.v_a) > 0.0);
    }

    #[test]
    fn cubic_primitive_differentiates_back() {
        let p = fig3_cubic();
        let h = 1e-5;
        for &v in &[0.3, 1.1, 2.5, 3.8] {
            let fd = (cubic_current_primitive(&p, v + h) - cubic_current_primitive(&p, v - h))
                / (2.0 * h);
            assert!((fd - cubic_current(&p, v)).abs() < 1e-6);
        }
        assert_eq!(cubic_current_primitive(&p, 0.0), 0.0);
    }

    #[test]
    fn linear_rc_rejects_bad_params() {
        assert!(LinearRcParams::new(0.0, 1.0).is_err());
        assert!(LinearRcParams::new(1.0, -2.0).is_err());
        assert!(CubicResistorParams::new(0.0, 0.0, 4.0, 1.0).is_err());
        assert!(CubicResistorParams::new(0.0, 2.0, 4.0, 0.0).is_err());
    }
}
