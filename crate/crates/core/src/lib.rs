//! Required-supply energy landscapes for excitable circuit models.
//!
//! The crate forces a parameterized past-voltage trajectory onto a circuit
//! model (dynamic voltage clamp), reconstructs the injected current from the
//! circuit equation, integrates the supplied energy, and sweeps amplitude /
//! rate grids to locate energy-based excitability thresholds as local maxima
//! of the required supply.
//!
//! Modules:
//! - [`models`]: linear RC, bistable cubic RC, FitzHugh--Nagumo and
//!   Hodgkin--Huxley circuits as pure functions of state and voltage.
//! - [`ansatz`]: exponential / biexponential past-voltage families and the
//!   truncated time grid.
//! - [`clamp`]: the clamp integrator and the supplied-energy breakdown.
//! - [`oracles`]: closed-form energies and classifications used as
//!   independent checks.
//! - [`search`]: rate minimization, landscape sweeps (data-parallel with the
//!   default `parallel` feature), threshold location, and free-run event
//!   verification.

// negated comparisons in parameter validation deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod clamp;
pub mod error;
pub mod models;
pub mod oracles;
pub mod search;

pub use ansatz::{truncation_grid, Ansatz, BiexponentialAnsatz, ExponentialAnsatz, TimeGrid};
pub use clamp::{
    clamp_simulate, convergence_check, supplied_energy, supplied_energy_sampled, BranchEnergy,
    ClampResult, ConvergenceReport, Sampling, SupplyBreakdown, Tolerances, TrajectoryPoint,
};
pub use error::{Error, Result};
pub use models::{
    cubic_current, fhn_cubic, gating_derivatives, hh_rates, steady_gates, CubicResistorParams,
    FhnParams, GatingState, HhParams, LinearRcParams, ModelSpec, ModelState,
};
pub use oracles::{
    bistable_required_supply, closed_form_j_fhn, closed_form_j_linear_rc, fhn_recovery_solution,
    singular_arc_residual, two_phase_hold_supply, CostSurfacePoint, RequiredSupplyClass,
};
pub use search::{
    find_local_maximum, inhibitory_sweep, linear_grid, log_grid, minimize_over_alpha,
    sweep_landscape, sweep_landscape_serial, verify_event, AlphaMinimum, EventOutcome,
    EventVerification, FreeRunSummary, InhibitoryComponent, InhibitoryLandscape, InhibitoryPoint,
    Landscape, LandscapePoint, MinLocation, SupplyOutcome, ThresholdClass, ThresholdPoint,
    ThresholdReport,
};
