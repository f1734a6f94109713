//! Property tests for the trajectory families and the clamp engine.

use proptest::prelude::*;

use excitable_core::*;

fn tolerances() -> Tolerances {
    Tolerances::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The exponential family decays monotonically into the past.
    #[test]
    fn exponential_monotone_into_the_past(
        amplitude in 0.01f64..50.0,
        rate in 0.01f64..50.0,
        t1 in -30.0f64..-0.001,
        dt in 0.001f64..10.0,
    ) {
        let a = Ansatz::exponential(amplitude, rate);
        let t2 = (t1 + dt).min(0.0);
        prop_assert!(a.evaluate(t1) <= a.evaluate(t2));
    }

    /// Every generated grid starts where the trajectory has shrunk below
    /// the requested relative tolerance and ends exactly at zero.
    #[test]
    fn truncation_grid_bounds_hold(
        amplitude in 0.1f64..30.0,
        rate in 0.05f64..30.0,
        b_amp in 0.0f64..20.0,
        b_rate in 0.05f64..30.0,
        log_tol in -9.0f64..-2.0,
    ) {
        let rel_tol = 10f64.powf(log_tol);
        let ansatz = Ansatz::biexponential(amplitude, rate, b_amp, b_rate);
        let grid = truncation_grid(&ansatz, rel_tol, 50.0, f64::INFINITY).unwrap();
        prop_assert!(ansatz.evaluate(grid.start()).abs() <= rel_tol * ansatz.amplitude_scale());
        prop_assert_eq!(grid.node(grid.steps()), 0.0);
        prop_assert_eq!(grid.node(0), grid.start());
    }

    /// Analytic derivative agrees with a central difference.
    #[test]
    fn derivative_matches_finite_difference(
        amplitude in 0.1f64..20.0,
        rate in 0.1f64..10.0,
        t in -5.0f64..-0.01,
    ) {
        let a = Ansatz::exponential(amplitude, rate);
        let h = 1e-6;
        let fd = (a.evaluate(t + h) - a.evaluate(t - h)) / (2.0 * h);
        let exact = a.derivative(t);
        prop_assert!((fd - exact).abs() <= 1e-5 * (1.0 + exact.abs()));
    }

    /// Energy-balance identity holds on every linear-RC run, and the
    /// resistive branch never extracts energy.
    #[test]
    fn linear_rc_identity_and_passivity(
        c in 0.1f64..5.0,
        r in 0.1f64..5.0,
        amplitude in -3.0f64..3.0,
        rate in 0.1f64..100.0,
    ) {
        let spec = ModelSpec::LinearRc(LinearRcParams::new(c, r).unwrap());
        let run = supplied_energy(&spec, &Ansatz::exponential(amplitude, rate), &tolerances())
            .unwrap();
        let s = &run.supply;
        let defect = (s.total - s.branch_sum() - s.storage).abs();
        prop_assert!(defect <= 1e-10 * (1.0 + s.total.abs()));
        prop_assert!(s.branches[0].energy >= 0.0);
        prop_assert!(s.total + 1e-12 >= s.storage - s.initial_storage);
    }

    /// The reported rate minimum never exceeds the supply at any probed
    /// rate (monotone sandwich).
    #[test]
    fn minimum_is_a_lower_envelope(
        amplitude in 0.1f64..2.0,
        probe_idx in 0usize..16,
    ) {
        let spec = ModelSpec::Fhn(FhnParams::calibrated());
        let grid = log_grid(1.0, 500.0, 16);
        let min = minimize_over_alpha(&spec, amplitude, &grid, &tolerances()).unwrap();
        let j = supplied_energy(
            &spec,
            &Ansatz::exponential(amplitude, grid[probe_idx]),
            &tolerances(),
        )
        .unwrap()
        .supply
        .total;
        prop_assert!(min.supply <= j + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// HH gating variables stay in [0, 1] under forced voltages across the
    /// physiological band, and the clamp never has to repair them.
    #[test]
    fn hh_gates_bounded_under_clamp(
        amplitude in -50.0f64..120.0,
        rate in 0.05f64..20.0,
    ) {
        let spec = ModelSpec::Hh(HhParams::standard());
        let run = supplied_energy(&spec, &Ansatz::exponential(amplitude, rate), &tolerances())
            .unwrap();
        prop_assert_eq!(run.gating_clamp_events, 0);
        match run.final_state {
            ModelState::Gating(g) => prop_assert!(g.in_bounds(0.0)),
            other => prop_assert!(false, "unexpected state {:?}", other),
        }
    }

    /// Identical inputs produce bit-identical breakdowns.
    #[test]
    fn clamp_is_deterministic(
        amplitude in 0.5f64..20.0,
        rate in 0.1f64..10.0,
    ) {
        let spec = ModelSpec::Hh(HhParams::standard());
        let a = Ansatz::exponential(amplitude, rate);
        let r1 = supplied_energy(&spec, &a, &tolerances()).unwrap();
        let r2 = supplied_energy(&spec, &a, &tolerances()).unwrap();
        prop_assert_eq!(r1, r2);
    }
}
