//! Parameterized past-voltage families on `t <= 0` and their time
//! discretization.
//!
//! Both families decay to zero into the past, so the semi-infinite horizon
//! can be truncated at a point `t0` where the trajectory has shrunk below a
//! relative tolerance; the supply contribution before `t0` scales as `v^2`
//! and is therefore O(rel_tol^2) relative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponential past voltage `v(t) = A exp(alpha t)`, `t <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialAnsatz {
    pub amplitude: f64,
    pub rate: f64,
}

/// Biexponential past voltage `v(t) = A exp(alpha t) - B exp(beta t)`,
/// with `B >= 0` acting as a hyperpolarizing prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiexponentialAnsatz {
    pub amplitude: f64,
    pub rate: f64,
    pub inhibitory_amplitude: f64,
    pub inhibitory_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Ansatz {
    Exponential(ExponentialAnsatz),
    Biexponential(BiexponentialAnsatz),
}

impl Ansatz {
    pub fn exponential(amplitude: f64, rate: f64) -> Self {
        assert!(rate > 0.0, "ansatz rate must be positive, got {rate}");
        Ansatz::Exponential(ExponentialAnsatz { amplitude, rate })
    }

    pub fn biexponential(
        amplitude: f64,
        rate: f64,
        inhibitory_amplitude: f64,
        inhibitory_rate: f64,
    ) -> Self {
        assert!(rate > 0.0, "ansatz rate must be positive, got {rate}");
        assert!(
            inhibitory_rate > 0.0,
            "inhibitory rate must be positive, got {inhibitory_rate}"
        );
        assert!(
            inhibitory_amplitude >= 0.0,
            "inhibitory amplitude must be nonnegative, got {inhibitory_amplitude}"
        );
        Ansatz::Biexponential(BiexponentialAnsatz {
            amplitude,
            rate,
            inhibitory_amplitude,
            inhibitory_rate,
        })
    }

    /// Trajectory value at `t <= 0`.
    pub fn evaluate(&self, t: f64) -> f64 {
        assert!(t <= 0.0, "ansatz is defined on t <= 0, got t = {t}");
        match *self {
            Ansatz::Exponential(a) => a.amplitude * (a.rate * t).exp(),
            Ansatz::Biexponential(a) => {
                a.amplitude * (a.rate * t).exp()
                    - a.inhibitory_amplitude * (a.inhibitory_rate * t).exp()
            }
        }
    }

    /// Exact analytic time derivative at `t <= 0` (no finite differencing).
    pub fn derivative(&self, t: f64) -> f64 {
        assert!(t <= 0.0, "ansatz is defined on t <= 0, got t = {t}");
        match *self {
            Ansatz::Exponential(a) => a.rate * a.amplitude * (a.rate * t).exp(),
            Ansatz::Biexponential(a) => {
                a.rate * a.amplitude * (a.rate * t).exp()
                    - a.inhibitory_rate * a.inhibitory_amplitude * (a.inhibitory_rate * t).exp()
            }
        }
    }

    /// Terminal value `v(0)`: `A` or `A - B`.
    pub fn terminal_voltage(&self) -> f64 {
        match *self {
            Ansatz::Exponential(a) => a.amplitude,
            Ansatz::Biexponential(a) => a.amplitude - a.inhibitory_amplitude,
        }
    }

    /// Slowest decay rate, which dominates how far into the past the
    /// trajectory stays visible.
    pub fn slowest_rate(&self) -> f64 {
        match *self {
            Ansatz::Exponential(a) => a.rate,
            Ansatz::Biexponential(a) => a.rate.min(a.inhibitory_rate),
        }
    }

    /// Fastest decay rate, which bounds how quickly the forcing varies.
    pub fn fastest_rate(&self) -> f64 {
        match *self {
            Ansatz::Exponential(a) => a.rate,
            Ansatz::Biexponential(a) => a.rate.max(a.inhibitory_rate),
        }
    }

    /// Largest component amplitude, `max(|A|, |B|)`.
    pub fn amplitude_scale(&self) -> f64 {
        match *self {
            Ansatz::Exponential(a) => a.amplitude.abs(),
            Ansatz::Biexponential(a) => a.amplitude.abs().max(a.inhibitory_amplitude.abs()),
        }
    }

    /// Conservative bounds on the voltages visited on `(-inf, 0]`.
    pub fn voltage_band(&self) -> (f64, f64) {
        match *self {
            Ansatz::Exponential(a) => (a.amplitude.min(0.0), a.amplitude.max(0.0)),
            Ansatz::Biexponential(a) => (
                (-a.inhibitory_amplitude)
                    .min(a.amplitude - a.inhibitory_amplitude)
                    .min(0.0),
                a.amplitude.max(0.0),
            ),
        }
    }
}

/// Uniform grid on `[t0, 0]` whose final node is exactly `t = 0`.
///
/// Nodes are computed as `t0 * (n - j) / n`, which pins both endpoints
/// bit-exactly; the spacing is uniform up to one rounding of the multiply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, n: usize) -> Self {
        assert!(t0 < 0.0 && t0.is_finite(), "grid start must be negative");
        assert!(n >= 1, "grid needs at least one step");
        Self {
            t0,
            dt: -t0 / n as f64,
            n,
        }
    }

    pub fn start(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    /// Node count, `steps + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j <= self.n);
        // ratio first: j = 0 gives exactly t0, j = n gives exactly 0
        self.t0 * (((self.n - j) as f64) / (self.n as f64))
    }
}

/// Builds the truncated grid for an ansatz: the start point satisfies
/// `|v(t0)| <= rel_tol * max(|A|, |B|)` and the step resolves both the
/// fastest ansatz rate and the fastest model time constant supplied by the
/// caller (`steps_per_timescale` steps each).
pub fn truncation_grid(
    ansatz: &Ansatz,
    rel_tol: f64,
    steps_per_timescale: f64,
    model_tau_min: f64,
) -> Result<TimeGrid> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidTruncationTol(rel_tol));
    }
    if !(steps_per_timescale >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "steps_per_timescale must be >= 1, got {steps_per_timescale}"
        )));
    }
    // padded by 1e-9 relative so the |v(t0)| <= rel_tol * scale bound holds
    // strictly despite rounding of exp(ln(rel_tol))
    let t0 = rel_tol.ln() / ansatz.slowest_rate() * (1.0 + 1e-9);
    let tau = (1.0 / ansatz.fastest_rate()).min(model_tau_min);
    let dt_max = tau / steps_per_timescale;
    let n = ((-t0) / dt_max).ceil() as usize;
    Ok(TimeGrid::new(t0, n.max(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_boundary_values() {
        let a = Ansatz::exponential(2.0, 1.0);
        assert_eq!(a.evaluate(0.0), 2.0);
        assert!((a.evaluate(-(2.0_f64.ln())) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn biexponential_terminal_is_amplitude_difference() {
        let a = Ansatz::biexponential(2.0, 1.0, 1.0, 3.0);
        assert_eq!(a.evaluate(0.0), 1.0);
        assert_eq!(a.terminal_voltage(), 1.0);
    }

    #[test]
    fn derivative_closed_forms() {
        let a = Ansatz::exponential(2.0, 3.0);
        assert_eq!(a.derivative(0.0), 6.0);
        let b = Ansatz::biexponential(2.0, 1.0, 1.0, 3.0);
        assert_eq!(b.derivative(0.0), -1.0);
        let c = Ansatz::exponential(1.0, 2.0);
        assert!((c.derivative(-1.0) - 2.0 * (-2.0_f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_central_difference_to_second_order() {
        let a = Ansatz::biexponential(1.5, 2.0, 0.7, 5.0);
        let t = -0.4;
        let exact = a.derivative(t);
        let fd = |h: f64| (a.evaluate(t + h) - a.evaluate(t - h)) / (2.0 * h);
        let e1 = (fd(1e-3) - exact).abs();
        let e2 = (fd(5e-4) - exact).abs();
        // halving h shrinks the error about 4x
        assert!(e2 < e1 / 3.0, "e1 = {e1}, e2 = {e2}");
    }

    #[test]
    #[should_panic(expected = "t <= 0")]
    fn evaluate_rejects_positive_time() {
        Ansatz::exponential(1.0, 1.0).evaluate(0.5);
    }

    #[test]
    fn truncation_start_scales_with_rate() {
        let tol = (-10.0_f64).exp();
        let g1 = truncation_grid(&Ansatz::exponential(1.0, 1.0), tol, 50.0, f64::INFINITY).unwrap();
        assert!((g1.start() + 10.0).abs() < 1e-6);
        let g2 = truncation_grid(&Ansatz::exponential(1.0, 2.0), tol, 50.0, f64::INFINITY).unwrap();
        assert!((g2.start() + 5.0).abs() < 1e-6);
    }

    #[test]
    fn truncation_bounds_the_start_value() {
        for ansatz in [
            Ansatz::exponential(3.0, 0.7),
            Ansatz::biexponential(11.5, 0.62, 4.0, 0.2),
        ] {
            let g = truncation_grid(&ansatz, 1e-6, 50.0, f64::INFINITY).unwrap();
            assert!(ansatz.evaluate(g.start()).abs() <= 1e-6 * ansatz.amplitude_scale());
        }
    }

    #[test]
    fn grid_ends_exactly_at_zero() {
        let g = truncation_grid(&Ansatz::exponential(1.0, 3.0), 1e-6, 50.0, 0.1).unwrap();
        assert_eq!(g.node(g.steps()), 0.0);
        assert_eq!(g.node(0), g.start());
    }

    #[test]
    fn truncation_rejects_bad_tolerance() {
        let a = Ansatz::exponential(1.0, 1.0);
        assert!(truncation_grid(&a, 0.0, 50.0, 1.0).is_err());
        assert!(truncation_grid(&a, 1.0, 50.0, 1.0).is_err());
        assert!(truncation_grid(&a, 1e-6, 0.5, 1.0).is_err());
    }
}
