use bogd::tcl::metrics::lockout_violations;
use bogd::tcl::{
    Availability, Dispatch, FleetRanges, ParamRange, RoundInputs, Scenario, ScenarioConfig, TclLoss,
};
use bogd::LossOracle;
use proptest::prelude::*;

fn scenario(n: usize, tau: u64, seed: u64, override_probability: f64, duration: u32) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.run.n = n;
    cfg.run.tau = tau;
    cfg.run.restart_block = (tau / 2).max(1);
    cfg.signal.s0 = 2.4 * n as f64;
    cfg.manual_override.probability = override_probability;
    cfg.manual_override.duration_rounds = duration;
    cfg.seeds.randomization = seed;
    cfg.seeds.fleet = seed.wrapping_mul(31).wrapping_add(7);
    cfg.seeds.thermal_noise = seed ^ 0x55;
    cfg.seeds.setpoint = seed + 1000;
    cfg.seeds.manual_override = seed + 2000;
    cfg.analysis.binary_optimum_cap = 8;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fleet_state_invariants_hold_every_round(
        n in 1usize..30,
        tau in 1u64..80,
        seed in any::<u64>(),
        prob in prop_oneof![Just(0.0), 0.0f64..0.3],
        duration in 1u32..4,
        relaxed in any::<bool>(),
    ) {
        let cfg = scenario(n, tau, seed, prob, duration);
        let sc = Scenario::build(&cfg).unwrap();
        let mode = if relaxed { Dispatch::Relaxed } else { Dispatch::Randomized };
        let rec = sc.simulate(mode).unwrap();
        prop_assert_eq!(rec.lockout_violations, 0);
        prop_assert_eq!(lockout_violations(&rec.effective_power, &rec.overrides, rec.lockout_rounds), 0);
        for t in 0..rec.rounds.len() {
            let mut sum_eff = 0.0;
            for i in 0..n {
                let e = rec.effective_power[t][i];
                prop_assert!(e >= 0.0);
                sum_eff += e;
                match rec.status[t][i] {
                    Availability::Lockout | Availability::TooCold => {
                        prop_assert_eq!(e, 0.0);
                        prop_assert!(!rec.overrides[t][i]);
                    }
                    Availability::TooHot | Availability::ManualOverride => {
                        prop_assert!(rec.overrides[t][i]);
                        prop_assert_eq!(e, sc.loads()[i].p_rated);
                    }
                    Availability::Available => prop_assert!(!rec.overrides[t][i]),
                }
            }
            prop_assert_eq!(rec.rounds[t].consumption, sum_eff);
            // Running mean of the temperatures.
            for i in 0..n {
                let mean = rec.temperatures[..=t].iter().map(|th| th[i]).sum::<f64>() / (t + 1) as f64;
                prop_assert!((rec.mean_temperatures[t][i] - mean).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn round_loss_is_convex_along_random_segments(
        seed in any::<u64>(),
        round in 1u64..50,
        lambda in 0.0f64..300.0,
        rho in 0.0f64..1000.0,
        points in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 6),
    ) {
        let cfg = scenario(6, 10, seed, 0.2, 1);
        let sc = Scenario::build(&cfg).unwrap();
        let mut state = bogd::tcl::FleetState::new(sc.loads());
        let rules = cfg.availability_rules().unwrap();
        let mut rng = bogd::rng_from_seed(seed);
        state.availability_update(sc.loads(), &rules, &mut rng);
        let loss = TclLoss::new(&RoundInputs {
            round,
            setpoint: 14.0,
            ambient: 34.1,
            state: &state,
            model: sc.model(),
            loads: sc.loads(),
            rho,
            lambda,
        }).unwrap();
        let x: Vec<f64> = points.iter().map(|p| p.0).collect();
        let y: Vec<f64> = points.iter().map(|p| p.1).collect();
        let w = points[0].2;
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| w * a + (1.0 - w) * b).collect();
        let lhs = loss.evaluate(&mid);
        let rhs = w * loss.evaluate(&x) + (1.0 - w) * loss.evaluate(&y);
        prop_assert!(lhs <= rhs + 1e-9 * rhs.abs().max(1.0));
    }
}

#[test]
fn wide_deadband_without_noise_keeps_every_load_available() {
    let mut cfg = scenario(20, 60, 3, 0.0, 1);
    cfg.fleet = FleetRanges {
        half_width: ParamRange(30.0, 30.0),
        ..FleetRanges::default()
    };
    cfg.thermal.noise_variance = 0.0;
    cfg.algorithm.lambda = 0.0;
    let sc = Scenario::build(&cfg).unwrap();
    let rec = sc.simulate(Dispatch::Relaxed).unwrap();
    for (t, st) in rec.status.iter().enumerate() {
        for (i, s) in st.iter().enumerate() {
            assert!(
                matches!(s, Availability::Available | Availability::Lockout),
                "round {t} load {i}: {s:?}"
            );
        }
    }
}
