//! Required-supply landscape sweep and energy-threshold location.
//!
//! For each target amplitude the supply is minimized over the ansatz rate
//! (coarse scan over a log-spaced grid, then golden-section refinement of
//! the bracketing triple). The threshold is an interior local maximum of
//! the resulting landscape. Per-amplitude minimizations are independent and
//! run in parallel when the `parallel` feature is enabled; results are
//! aggregated in amplitude order, so the output is identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Ansatz;
use crate::clamp::{supplied_energy, Tolerances};
use crate::error::{Error, Result};
use crate::models::{cubic_slope, fhn_cubic, ModelSpec, ModelState, MAX_STATE_DIM};
use crate::oracles::{bistable_required_supply, RequiredSupplyClass};

const GOLDEN_RATIO_CONJUGATE: f64 = 0.618_033_988_749_894_9;

/// Relative difference below which two landscape values count as a plateau
/// rather than a strict extremum.
const PLATEAU_REL_TOL: f64 = 1e-12;

/// Refinement subdivides each bracketing amplitude cell this many times.
const REFINE_FACTOR: usize = 10;

/// Inclusive linear grid with exact endpoints.
pub fn linear_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && max > min);
    let mut g: Vec<f64> = (0..count)
        .map(|j| min + (max - min) * j as f64 / (count - 1) as f64)
        .collect();
    g[0] = min;
    g[count - 1] = max;
    g
}

/// Inclusive log-spaced grid with exact endpoints.
pub fn log_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && max > min && min > 0.0);
    let (lo, hi) = (min.ln(), max.ln());
    let mut g: Vec<f64> = (0..count)
        .map(|j| (lo + (hi - lo) * j as f64 / (count - 1) as f64).exp())
        .collect();
    g[0] = min;
    g[count - 1] = max;
    g
}

/// Where the rate minimizer landed relative to the probed grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinLocation {
    Interior,
    /// Minimum at the smallest probed rate.
    LowerEdge,
    /// Minimum at the largest probed rate (the linear-RC `alpha -> inf`
    /// impulse limit shows up here).
    UpperEdge,
}

/// Result of minimizing the supply over the ansatz rate at one amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaMinimum {
    pub alpha: f64,
    pub supply: f64,
    pub location: MinLocation,
    pub evaluations: usize,
}

fn validate_rate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 8 {
        return Err(Error::GridTooSmall {
            min: 8,
            got: grid.len(),
        });
    }
    if !(grid[0] > 0.0) || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidRateGrid);
    }
    Ok(())
}

/// Minimizes `J(rate)` for an ansatz family parameterized by its rate:
/// coarse scan over the grid, then golden-section refinement of the
/// bracketing triple on the log axis until the relative interval width
/// drops below `refine_tol`. The best evaluated point is returned, so
/// refinement never reports a value above the coarse minimum.
fn minimize_over_rate<F>(build: F, rate_grid: &[f64], tol: &Tolerances) -> Result<AlphaMinimum>
where
    F: Fn(f64) -> Result<f64>,
{
    validate_rate_grid(rate_grid)?;
    let mut evaluations = 0usize;
    let mut eval = |rate: f64| -> Result<f64> {
        evaluations += 1;
        build(rate)
    };

    let mut best_idx = 0usize;
    let mut best_val = f64::INFINITY;
    let mut values = Vec::with_capacity(rate_grid.len());
    for (j, &rate) in rate_grid.iter().enumerate() {
        let v = eval(rate)?;
        if v < best_val {
            best_val = v;
            best_idx = j;
        }
        values.push(v);
    }

    if best_idx == 0 {
        return Ok(AlphaMinimum {
            alpha: rate_grid[0],
            supply: values[0],
            location: MinLocation::LowerEdge,
            evaluations,
        });
    }
    if best_idx == rate_grid.len() - 1 {
        return Ok(AlphaMinimum {
            alpha: *rate_grid.last().unwrap(),
            supply: *values.last().unwrap(),
            location: MinLocation::UpperEdge,
            evaluations,
        });
    }

    // golden-section on the log axis inside the bracketing triple
    let mut lo = rate_grid[best_idx - 1].ln();
    let mut hi = rate_grid[best_idx + 1].ln();
    let mut best = (rate_grid[best_idx], values[best_idx]);
    let mut c = hi - GOLDEN_RATIO_CONJUGATE * (hi - lo);
    let mut d = lo + GOLDEN_RATIO_CONJUGATE * (hi - lo);
    let mut fc = eval(c.exp())?;
    let mut fd = eval(d.exp())?;
    loop {
        if fc < best.1 {
            best = (c.exp(), fc);
        }
        if fd < best.1 {
            best = (d.exp(), fd);
        }
        if (hi - lo) <= tol.refine_tol {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - GOLDEN_RATIO_CONJUGATE * (hi - lo);
            fc = eval(c.exp())?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + GOLDEN_RATIO_CONJUGATE * (hi - lo);
            fd = eval(d.exp())?;
        }
    }

    Ok(AlphaMinimum {
        alpha: best.0,
        supply: best.1,
        location: MinLocation::Interior,
        evaluations,
    })
}

/// Minimum supply over the exponential-ansatz rate at a fixed amplitude.
pub fn minimize_over_alpha(
    spec: &ModelSpec,
    amplitude: f64,
    alpha_grid: &[f64],
    tol: &Tolerances,
) -> Result<AlphaMinimum> {
    minimize_over_rate(
        |rate| {
            supplied_energy(spec, &Ansatz::exponential(amplitude, rate), tol)
                .map(|r| r.supply.total)
        },
        alpha_grid,
        tol,
    )
}

/// Landscape node: either an evaluated minimum or a cell censored by the
/// analytic classifier (bistable RC beyond the middle root, where the
/// required supply is unbounded below).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SupplyOutcome {
    Evaluated {
        supply: f64,
        alpha: f64,
        location: MinLocation,
        /// Clamp evaluations spent on this node (coarse scan + refinement).
        evaluations: usize,
    },
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandscapePoint {
    pub amplitude: f64,
    #[serde(flatten)]
    pub outcome: SupplyOutcome,
}

impl LandscapePoint {
    /// Supply value for ordering scans; censored cells compare as -inf.
    fn scan_value(&self) -> f64 {
        match self.outcome {
            SupplyOutcome::Evaluated { supply, .. } => supply,
            SupplyOutcome::Unbounded => f64::NEG_INFINITY,
        }
    }

    pub fn supply(&self) -> Option<f64> {
        match self.outcome {
            SupplyOutcome::Evaluated { supply, .. } => Some(supply),
            SupplyOutcome::Unbounded => None,
        }
    }
}

/// Required-supply landscape `S_r(A)` over an amplitude grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Landscape {
    pub points: Vec<LandscapePoint>,
    pub alpha_grid: Vec<f64>,
    pub tolerances: Tolerances,
}

fn validate_amplitude_grid(a_grid: &[f64]) -> Result<()> {
    if a_grid.is_empty() || !(a_grid[0] >= 0.0) || a_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidAmplitudeGrid);
    }
    Ok(())
}

fn landscape_point(
    spec: &ModelSpec,
    amplitude: f64,
    alpha_grid: &[f64],
    tol: &Tolerances,
) -> Result<LandscapePoint> {
    if let ModelSpec::CubicRc { resistor, .. } = spec {
        if let RequiredSupplyClass::UnboundedBelow =
            bistable_required_supply(resistor, spec.capacitance(), amplitude)?
        {
            return Ok(LandscapePoint {
                amplitude,
                outcome: SupplyOutcome::Unbounded,
            });
        }
    }
    let min = minimize_over_alpha(spec, amplitude, alpha_grid, tol)?;
    Ok(LandscapePoint {
        amplitude,
        outcome: SupplyOutcome::Evaluated {
            supply: min.supply,
            alpha: min.alpha,
            location: min.location,
            evaluations: min.evaluations,
        },
    })
}

#[cfg(feature = "parallel")]
fn map_amplitudes(
    spec: &ModelSpec,
    a_grid: &[f64],
    alpha_grid: &[f64],
    tol: &Tolerances,
) -> Result<Vec<LandscapePoint>> {
    a_grid
        .par_iter()
        .map(|&a| landscape_point(spec, a, alpha_grid, tol))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn map_amplitudes(
    spec: &ModelSpec,
    a_grid: &[f64],
    alpha_grid: &[f64],
    tol: &Tolerances,
) -> Result<Vec<LandscapePoint>> {
    a_grid
        .iter()
        .map(|&a| landscape_point(spec, a, alpha_grid, tol))
        .collect()
}

/// Sweeps the required-supply landscape over the amplitude grid, minimizing
/// over the rate grid at each node. Runs amplitudes concurrently when built
/// with the `parallel` feature.
pub fn sweep_landscape(
    spec: &ModelSpec,
    a_grid: &[f64],
    alpha_grid: &[f64],
    tol: &Tolerances,
) -> Result<Landscape> {
    spec.validate()?;
    tol.validate()?;
    validate_amplitude_grid(a_grid)?;
    validate_rate_grid(alpha_grid)?;
    Ok(Landscape {
        points: map_amplitudes(spec, a_grid, alpha_grid, tol)?,
        alpha_grid: alpha_grid.to_vec(),
        tolerances: *tol,
    })
}

/// Always-sequential variant of [`sweep_landscape`]; the parallel path must
/// produce bit-identical output (exercised by tests and benches).
pub fn sweep_landscape_serial(
    spec: &ModelSpec,
    a_grid: &[f64],
    alpha_grid: &[f64],
    tol: &Tolerances,
) -> Result<Landscape> {
    spec.validate()?;
    tol.validate()?;
    validate_amplitude_grid(a_grid)?;
    validate_rate_grid(alpha_grid)?;
    let points = a_grid
        .iter()
        .map(|&a| landscape_point(spec, a, alpha_grid, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(Landscape {
        points,
        alpha_grid: alpha_grid.to_vec(),
        tolerances: *tol,
    })
}

/// Classification of a located (or absent) energy threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdClass {
    /// Strict interior local maximum of the landscape.
    InteriorLocalMax,
    /// Crest adjacent to a censored (unbounded-below) region: the bistable
    /// saddle at the middle root.
    BoundarySaddle,
    /// Landscape has no interior local maximum (e.g. the convex linear-RC
    /// landscape).
    NoneFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InhibitoryComponent {
    pub b: f64,
    pub beta: f64,
    pub terminal_voltage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdPoint {
    pub amplitude: f64,
    pub alpha: f64,
    pub supply: f64,
    /// Amplitude spacing of the final refinement pass.
    pub resolution: f64,
    pub inhibitory: Option<InhibitoryComponent>,
}

/// Free-run outcomes one probe step above and below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventVerification {
    pub probe_offset: f64,
    pub above: EventOutcome,
    pub below: EventOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub classification: ThresholdClass,
    pub threshold: Option<ThresholdPoint>,
    pub verification: Option<EventVerification>,
}

impl ThresholdReport {
    fn none_found() -> Self {
        Self {
            classification: ThresholdClass::NoneFound,
            threshold: None,
            verification: None,
        }
    }
}

fn strictly_greater(a: f64, b: f64) -> bool {
    // -inf neighbors (censored cells) always lose
    a > b && (b == f64::NEG_INFINITY || (a - b).abs() > PLATEAU_REL_TOL * a.abs().max(b.abs()))
}

fn is_plateau(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= PLATEAU_REL_TOL * a.abs().max(b.abs())
}

/// Scans for the best strict interior local maximum; also reports whether a
/// plateau blocked some candidate.
fn scan_local_max(values: &[f64]) -> (Option<usize>, bool) {
    let mut best: Option<usize> = None;
    let mut plateau = false;
    for j in 1..values.len().saturating_sub(1) {
        let (left, mid, right) = (values[j - 1], values[j], values[j + 1]);
        if !mid.is_finite() {
            continue;
        }
        if strictly_greater(mid, left) && strictly_greater(mid, right) {
            if best.is_none_or(|b| mid > values[b]) {
                best = Some(j);
            }
        } else if mid >= left && mid >= right && (is_plateau(mid, left) || is_plateau(mid, right)) {
            plateau = true;
        }
    }
    (best, plateau)
}

fn refine_bracket(
    spec: &ModelSpec,
    landscape: &Landscape,
    j: usize,
) -> Result<(Vec<LandscapePoint>, f64)> {
    let lo = landscape.points[j - 1].amplitude;
    let hi = landscape.points[j + 1].amplitude;
    let fine = linear_grid(lo, hi, 2 * REFINE_FACTOR + 1);
    let resolution = (hi - lo) / (2 * REFINE_FACTOR) as f64;
    let points = map_amplitudes(spec, &fine, &landscape.alpha_grid, &landscape.tolerances)?;
    Ok((points, resolution))
}

fn report_from_points(points: &[LandscapePoint], j: usize, resolution: f64) -> ThresholdReport {
    let censored_neighbor = matches!(points[j - 1].outcome, SupplyOutcome::Unbounded)
        || matches!(points[j + 1].outcome, SupplyOutcome::Unbounded);
    let (supply, alpha) = match points[j].outcome {
        SupplyOutcome::Evaluated { supply, alpha, .. } => (supply, alpha),
        SupplyOutcome::Unbounded => unreachable!("censored cell selected as maximum"),
    };
    ThresholdReport {
        classification: if censored_neighbor {
            ThresholdClass::BoundarySaddle
        } else {
            ThresholdClass::InteriorLocalMax
        },
        threshold: Some(ThresholdPoint {
            amplitude: points[j].amplitude,
            alpha,
            supply,
            resolution,
            inhibitory: None,
        }),
        verification: None,
    }
}

/// Locates the energy threshold as a local maximum of the landscape: scans
/// for an interior node strictly above both neighbors, then re-sweeps a
/// 10x finer amplitude grid over the bracketing interval once. Censored
/// cells compare as -inf; plateaus (neighbors equal within 1e-12 relative)
/// never qualify directly but do trigger the refinement pass. `NoneFound`
/// is the valid outcome for convex landscapes.
pub fn find_local_maximum(spec: &ModelSpec, landscape: &Landscape) -> Result<ThresholdReport> {
    if landscape.points.len() < 3 {
        return Err(Error::InvalidAmplitudeGrid);
    }
    let values: Vec<f64> = landscape.points.iter().map(|p| p.scan_value()).collect();
    let (coarse, plateau) = scan_local_max(&values);

    let j = match coarse {
        Some(j) => j,
        None if plateau => {
            // refine around the widest plateau crest and rescan once
            let crest = values
                .iter()
                .enumerate()
                .filter(|(_, v)| v.is_finite())
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(j, _)| j);
            match crest {
                Some(j) if j > 0 && j + 1 < values.len() => {
                    let (fine, resolution) = refine_bracket(spec, landscape, j)?;
                    let fine_values: Vec<f64> = fine.iter().map(|p| p.scan_value()).collect();
                    return Ok(match scan_local_max(&fine_values).0 {
                        Some(k) => report_from_points(&fine, k, resolution),
                        None => ThresholdReport::none_found(),
                    });
                }
                _ => return Ok(ThresholdReport::none_found()),
            }
        }
        None => return Ok(ThresholdReport::none_found()),
    };

    let (fine, resolution) = refine_bracket(spec, landscape, j)?;
    let fine_values: Vec<f64> = fine.iter().map(|p| p.scan_value()).collect();
    // the coarse maximum sits on the fine grid, so the fine argmax is
    // interior by construction
    let k = fine_values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(k, _)| k)
        .unwrap_or(REFINE_FACTOR);
    let k = k.clamp(1, fine.len() - 2);
    Ok(report_from_points(&fine, k, resolution))
}

/// One node of the inhibitory (biexponential) sweep, indexed by the
/// terminal voltage `A* - B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InhibitoryPoint {
    pub b: f64,
    pub beta: f64,
    pub terminal_voltage: f64,
    pub supply: f64,
    pub location: MinLocation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InhibitoryLandscape {
    pub base_amplitude: f64,
    pub base_alpha: f64,
    pub points: Vec<InhibitoryPoint>,
    pub beta_grid: Vec<f64>,
    pub tolerances: Tolerances,
}

fn inhibitory_point(
    spec: &ModelSpec,
    base_amplitude: f64,
    base_alpha: f64,
    b: f64,
    beta_grid: &[f64],
    tol: &Tolerances,
) -> Result<InhibitoryPoint> {
    let min = minimize_over_rate(
        |beta| {
            supplied_energy(
                spec,
                &Ansatz::biexponential(base_amplitude, base_alpha, b, beta),
                tol,
            )
            .map(|r| r.supply.total)
        },
        beta_grid,
        tol,
    )?;
    Ok(InhibitoryPoint {
        b,
        beta: min.alpha,
        terminal_voltage: base_amplitude - b,
        supply: min.supply,
        location: min.location,
    })
}

#[cfg(feature = "parallel")]
fn map_inhibition(
    spec: &ModelSpec,
    base_amplitude: f64,
    base_alpha: f64,
    b_grid: &[f64],
    beta_grid: &[f64],
    tol: &Tolerances,
) -> Result<Vec<InhibitoryPoint>> {
    b_grid
        .par_iter()
        .map(|&b| inhibitory_point(spec, base_amplitude, base_alpha, b, beta_grid, tol))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn map_inhibition(
    spec: &ModelSpec,
    base_amplitude: f64,
    base_alpha: f64,
    b_grid: &[f64],
    beta_grid: &[f64],
    tol: &Tolerances,
) -> Result<Vec<InhibitoryPoint>> {
    b_grid
        .iter()
        .map(|&b| inhibitory_point(spec, base_amplitude, base_alpha, b, beta_grid, tol))
        .collect()
}

/// Sweeps the biexponential family `A* exp(alpha* t) - B exp(beta t)` with
/// the excitatory optimum held fixed: for each hyperpolarizing amplitude B
/// the supply is minimized over beta, and the threshold is the local
/// maximum of the resulting landscape over terminal voltage.
pub fn inhibitory_sweep(
    spec: &ModelSpec,
    base_amplitude: f64,
    base_alpha: f64,
    b_grid: &[f64],
    beta_grid: &[f64],
    tol: &Tolerances,
) -> Result<(InhibitoryLandscape, ThresholdReport)> {
    spec.validate()?;
    tol.validate()?;
    validate_amplitude_grid(b_grid)?;
    validate_rate_grid(beta_grid)?;
    if !(base_amplitude > 0.0 && base_alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "excitatory optimum must be positive, got (A = {base_amplitude}, alpha = {base_alpha})"
        )));
    }

    let points = map_inhibition(spec, base_amplitude, base_alpha, b_grid, beta_grid, tol)?;
    let landscape = InhibitoryLandscape {
        base_amplitude,
        base_alpha,
        points,
        beta_grid: beta_grid.to_vec(),
        tolerances: *tol,
    };

    let values: Vec<f64> = landscape.points.iter().map(|p| p.supply).collect();
    let report = match scan_local_max(&values).0 {
        None => ThresholdReport::none_found(),
        Some(j) => {
            // one 10x-finer pass over the bracketing B interval
            let lo = landscape.points[j - 1].b;
            let hi = landscape.points[j + 1].b;
            let fine_grid = linear_grid(lo, hi, 2 * REFINE_FACTOR + 1);
            let resolution = (hi - lo) / (2 * REFINE_FACTOR) as f64;
            let fine =
                map_inhibition(spec, base_amplitude, base_alpha, &fine_grid, beta_grid, tol)?;
            let fine_values: Vec<f64> = fine.iter().map(|p| p.supply).collect();
            let k = fine_values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(k, _)| k)
                .unwrap_or(REFINE_FACTOR)
                .clamp(1, fine.len() - 2);
            let best = &fine[k];
            ThresholdReport {
                classification: ThresholdClass::InteriorLocalMax,
                threshold: Some(ThresholdPoint {
                    amplitude: base_amplitude,
                    alpha: base_alpha,
                    supply: best.supply,
                    resolution,
                    inhibitory: Some(InhibitoryComponent {
                        b: best.b,
                        beta: best.beta,
                        terminal_voltage: best.terminal_voltage,
                    }),
                }),
                verification: None,
            }
        }
    };
    Ok((landscape, report))
}

/// Outcome of a free (unclamped, i = 0) run from a terminal clamp state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventOutcome {
    Spike,
    Decay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeRunSummary {
    pub v_max: f64,
    pub v_final: f64,
    pub outcome: EventOutcome,
}

fn free_run_step_size(spec: &ModelSpec, v_lo: f64, v_hi: f64) -> f64 {
    match spec {
        ModelSpec::LinearRc(p) => p.resistance * p.capacitance / 20.0,
        ModelSpec::CubicRc {
            capacitance,
            resistor,
        } => {
            let mut max_slope = 1e-12_f64;
            for j in 0..=64 {
                let v = v_lo + (v_hi - v_lo) * j as f64 / 64.0;
                max_slope = max_slope.max(cubic_slope(resistor, v).abs());
            }
            capacitance / max_slope / 20.0
        }
        ModelSpec::Fhn(p) => {
            let mut max_slope = 1e-12_f64;
            for j in 0..=64 {
                let v = v_lo + (v_hi - v_lo) * j as f64 / 64.0;
                let h = 1e-6;
                let slope = (fhn_cubic(p, v + h) - fhn_cubic(p, v - h)) / (2.0 * h);
                max_slope = max_slope.max(slope.abs());
            }
            (p.epsilon / max_slope / 20.0).min(if p.gamma > 0.0 {
                1.0 / p.gamma / 50.0
            } else {
                f64::INFINITY
            })
        }
        ModelSpec::Hh(p) => {
            let tau_gate = crate::models::fastest_gate_time_constant(v_lo, v_hi);
            let tau_v = p.capacitance / (p.g_na + p.g_k + p.g_leak);
            (tau_gate / 50.0).min(tau_v / 20.0)
        }
    }
}

/// Free-runs the full model from `(v0, state)` with zero input and
/// classifies the trajectory. Event levels: HH spikes past 80 mV, FHN past
/// 0.9; the bistable RC counts settling on the high-storage side of the
/// middle root as the event. The linear RC has no regenerative branch and
/// always decays.
pub fn verify_event(
    spec: &ModelSpec,
    v0: f64,
    state: &ModelState,
    horizon: f64,
) -> Result<FreeRunSummary> {
    spec.validate()?;
    spec.check_state(state)?;
    assert!(horizon > 0.0, "horizon must be positive");

    // generous band: spikes overshoot the clamp range
    let (band_lo, band_hi) = match spec {
        ModelSpec::Hh(_) => (v0.min(-30.0), 130.0),
        ModelSpec::Fhn(_) => (v0.min(-0.5), 1.5),
        ModelSpec::CubicRc { resistor, .. } => (v0.min(resistor.v_a), resistor.v_c.max(v0)),
        ModelSpec::LinearRc(_) => (v0.min(0.0), v0.max(0.0)),
    };
    let dt = free_run_step_size(spec, band_lo, band_hi);
    let steps = ((horizon / dt).ceil() as usize).max(1);
    let h = horizon / steps as f64;

    let c = spec.capacitance();
    let is_hh = matches!(spec, ModelSpec::Hh(_));
    let n_branches = spec.branch_labels().len();

    // full state: voltage followed by the internal components
    let mut z = [0.0_f64; 1 + MAX_STATE_DIM];
    z[0] = v0;
    z[1..].copy_from_slice(&state.to_array());

    let deriv = |_t: f64, z: &[f64; 1 + MAX_STATE_DIM]| {
        let v = z[0];
        let y = [z[1], z[2], z[3]];
        let mut currents = [0.0_f64; crate::models::MAX_BRANCHES];
        spec.branch_currents_raw(v, &y, &mut currents);
        let dy = spec.state_derivative_raw(v, &y);
        let mut dz = [0.0_f64; 1 + MAX_STATE_DIM];
        dz[0] = -currents[..n_branches].iter().sum::<f64>() / c;
        dz[1..].copy_from_slice(&dy);
        dz
    };

    // crossing the event level settles the classification, so the run can
    // stop there (the FHN cubic grows without bound past its upper root
    // under this sign convention, so integrating further would blow up)
    let event_level = match spec {
        ModelSpec::Hh(_) => Some(80.0),
        ModelSpec::Fhn(_) => Some(0.9),
        _ => None,
    };

    let mut v_max = v0;
    if let Some(level) = event_level {
        if v0 >= level {
            return Ok(FreeRunSummary {
                v_max,
                v_final: v0,
                outcome: EventOutcome::Spike,
            });
        }
    }
    for step in 0..steps {
        let t = step as f64 * h;
        z = rk4_step_full(t, h, &z, &deriv);
        if is_hh {
            for x in z[1..].iter_mut() {
                *x = x.clamp(0.0, 1.0);
            }
        }
        if !z.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFiniteState { step, time: t + h });
        }
        v_max = v_max.max(z[0]);
        if let Some(level) = event_level {
            if v_max >= level {
                return Ok(FreeRunSummary {
                    v_max,
                    v_final: z[0],
                    outcome: EventOutcome::Spike,
                });
            }
        }
    }
    let v_final = z[0];

    let spiked = match spec {
        ModelSpec::CubicRc { resistor, .. } => v_final >= 0.5 * (resistor.v_b + resistor.v_c),
        _ => false,
    };
    Ok(FreeRunSummary {
        v_max,
        v_final,
        outcome: if spiked {
            EventOutcome::Spike
        } else {
            EventOutcome::Decay
        },
    })
}

fn rk4_step_full<F>(t: f64, h: f64, z: &[f64; 1 + MAX_STATE_DIM], f: &F) -> [f64; 1 + MAX_STATE_DIM]
where
    F: Fn(f64, &[f64; 1 + MAX_STATE_DIM]) -> [f64; 1 + MAX_STATE_DIM],
{
    let k1 = f(t, z);
    let mut z2 = *z;
    for i in 0..z.len() {
        z2[i] = z[i] + 0.5 * h * k1[i];
    }
    let k2 = f(t + 0.5 * h, &z2);
    let mut z3 = *z;
    for i in 0..z.len() {
        z3[i] = z[i] + 0.5 * h * k2[i];
    }
    let k3 = f(t + 0.5 * h, &z3);
    let mut z4 = *z;
    for i in 0..z.len() {
        z4[i] = z[i] + h * k3[i];
    }
    let k4 = f(t + h, &z4);
    let mut out = *z;
    for i in 0..z.len() {
        out[i] = z[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{CubicResistorParams, FhnParams, LinearRcParams};
    use crate::oracles::closed_form_j_linear_rc;

    fn linear_rc() -> ModelSpec {
        ModelSpec::LinearRc(LinearRcParams::new(1.0, 1.0).unwrap())
    }

    fn cubic_rc() -> ModelSpec {
        ModelSpec::CubicRc {
            capacitance: 1.0,
            resistor: CubicResistorParams::new(0.0, 2.0, 4.0, 1.0).unwrap(),
        }
    }

    #[test]
    fn grids_have_exact_endpoints() {
        let g = log_grid(0.05, 20.0, 40);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[39], 20.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let l = linear_grid(0.0, 2.0, 41);
        assert_eq!(l[0], 0.0);
        assert_eq!(l[40], 2.0);
    }

    #[test]
    fn linear_rc_minimum_sits_on_the_upper_edge() {
        let grid = log_grid(0.5, 1000.0, 24);
        let min = minimize_over_alpha(&linear_rc(), 1.0, &grid, &Tolerances::default()).unwrap();
        assert_eq!(min.location, MinLocation::UpperEdge);
        assert_eq!(min.alpha, 1000.0);
        // S_r -> C A^2 / 2 as the edge grows
        assert!((min.supply - 0.5).abs() < 0.01, "supply = {}", min.supply);
    }

    #[test]
    fn golden_section_refines_an_interior_minimum() {
        // FHN at amplitude 0.5 has an interior minimizer (around alpha ~ 30)
        let spec = ModelSpec::Fhn(FhnParams::calibrated());
        let grid = log_grid(1.0, 500.0, 16);
        let min = minimize_over_alpha(&spec, 0.5, &grid, &Tolerances::default()).unwrap();
        assert_eq!(min.location, MinLocation::Interior);
        assert!(
            min.alpha > 10.0 && min.alpha < 100.0,
            "alpha = {}",
            min.alpha
        );
        // refinement never increases the reported minimum below the coarse scan
        let coarse_best = grid
            .iter()
            .map(|&a| {
                supplied_energy(&spec, &Ansatz::exponential(0.5, a), &Tolerances::default())
                    .unwrap()
                    .supply
                    .total
            })
            .fold(f64::INFINITY, f64::min);
        assert!(min.supply <= coarse_best + 1e-15);
    }

    #[test]
    fn interior_minimizer_is_stationary() {
        // envelope consistency: at a reported interior minimizer the
        // log-axis slope of the closed-form cost is at refinement scale
        let p = FhnParams::calibrated();
        let spec = ModelSpec::Fhn(p);
        let grid = log_grid(1.0, 500.0, 40);
        let tol = Tolerances::default();
        for a in [0.5, 1.4, 1.7] {
            let min = minimize_over_alpha(&spec, a, &grid, &tol).unwrap();
            assert_eq!(min.location, MinLocation::Interior, "A = {a}");
            let j = |rate: f64| crate::oracles::closed_form_j_fhn(&p, a, rate);
            let h = 1e-5;
            // d J / d ln(alpha), sampled
            let slope = (j(min.alpha * (1.0 + h)) - j(min.alpha * (1.0 - h))) / (2.0 * h);
            let scale = j(min.alpha).abs().max(1e-9);
            assert!(
                slope.abs() <= 0.01 * scale,
                "A = {a}: |dJ/dln(alpha)| = {:.3e} not small vs J = {:.3e}",
                slope.abs(),
                scale
            );
        }
    }

    #[test]
    fn rate_grid_validation() {
        let spec = linear_rc();
        let short = vec![1.0, 2.0, 3.0];
        assert!(matches!(
            minimize_over_alpha(&spec, 1.0, &short, &Tolerances::default()),
            Err(Error::GridTooSmall { .. })
        ));
        let unsorted = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 7.0];
        assert!(matches!(
            minimize_over_alpha(&spec, 1.0, &unsorted, &Tolerances::default()),
            Err(Error::InvalidRateGrid)
        ));
    }

    #[test]
    fn linear_rc_landscape_is_quadratic_with_no_threshold() {
        let a_grid = linear_grid(0.0, 2.0, 21);
        let alpha_grid = log_grid(0.5, 1000.0, 24);
        let spec = linear_rc();
        let tol = Tolerances::default();
        let scape = sweep_landscape(&spec, &a_grid, &alpha_grid, &tol).unwrap();
        for p in &scape.points {
            let expected = 0.5 * p.amplitude * p.amplitude;
            let got = p.supply().unwrap();
            assert!(
                (got - expected).abs() <= 0.01 * expected.max(1e-12),
                "A = {}: {} vs {}",
                p.amplitude,
                got,
                expected
            );
        }
        let report = find_local_maximum(&spec, &scape).unwrap();
        assert_eq!(report.classification, ThresholdClass::NoneFound);
    }

    #[test]
    fn cubic_rc_crest_lands_at_the_middle_root() {
        let spec = cubic_rc();
        let a_grid = linear_grid(0.0, 4.0, 41);
        let alpha_grid = log_grid(1.0, 2000.0, 24);
        let scape = sweep_landscape(&spec, &a_grid, &alpha_grid, &Tolerances::default()).unwrap();
        // censored beyond v_b
        for p in &scape.points {
            if p.amplitude > 2.0 {
                assert_eq!(p.outcome, SupplyOutcome::Unbounded);
            } else {
                assert!(p.supply().is_some());
            }
        }
        let report = find_local_maximum(&spec, &scape).unwrap();
        assert_eq!(report.classification, ThresholdClass::BoundarySaddle);
        let t = report.threshold.unwrap();
        let cell = 0.1;
        assert!(
            (t.amplitude - 2.0).abs() <= cell,
            "crest at {}",
            t.amplitude
        );
    }

    #[test]
    fn sandwich_property_on_probed_rates() {
        let spec = ModelSpec::Fhn(FhnParams::calibrated());
        let alpha_grid = log_grid(1.0, 500.0, 16);
        let tol = Tolerances::default();
        for a in [0.3, 0.9, 1.4] {
            let min = minimize_over_alpha(&spec, a, &alpha_grid, &tol).unwrap();
            for &probe in &alpha_grid {
                let j = supplied_energy(&spec, &Ansatz::exponential(a, probe), &tol)
                    .unwrap()
                    .supply
                    .total;
                assert!(min.supply <= j + 1e-15);
            }
        }
    }

    #[test]
    fn verify_event_cubic_switches_to_the_high_side() {
        let spec = cubic_rc();
        let run = verify_event(&spec, 2.1, &ModelState::Empty, 60.0).unwrap();
        assert_eq!(run.outcome, EventOutcome::Spike);
        assert!(
            (run.v_final - 4.0).abs() < 0.05,
            "v_final = {}",
            run.v_final
        );
        let run = verify_event(&spec, 1.9, &ModelState::Empty, 60.0).unwrap();
        assert_eq!(run.outcome, EventOutcome::Decay);
        assert!(run.v_final < 0.05);
    }

    #[test]
    fn verify_event_linear_rc_always_decays() {
        let run = verify_event(&linear_rc(), 1.5, &ModelState::Empty, 20.0).unwrap();
        assert_eq!(run.outcome, EventOutcome::Decay);
    }

    #[test]
    fn scan_prefers_the_larger_of_two_maxima() {
        let values = [0.0, 1.0, 0.5, 2.0, 0.1];
        let (best, plateau) = scan_local_max(&values);
        assert_eq!(best, Some(3));
        assert!(!plateau);
    }

    #[test]
    fn plateaus_do_not_qualify() {
        let values = [0.0, 1.0, 1.0, 0.5];
        let (best, plateau) = scan_local_max(&values);
        assert_eq!(best, None);
        assert!(plateau);
    }

    #[test]
    fn linear_rc_example_supply_matches_closed_form_at_edge() {
        let grid = log_grid(0.5, 1000.0, 16);
        let min = minimize_over_alpha(&linear_rc(), 1.0, &grid, &Tolerances::default()).unwrap();
        let exact = closed_form_j_linear_rc(1.0, 1.0, 1.0, 1000.0);
        assert!((min.supply - exact).abs() / exact < 1e-4);
    }
}
