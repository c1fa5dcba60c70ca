//! Pathwise invariants of simulated runs on random configurations.

use proptest::prelude::*;
use qrecon_core::analytic::DEFAULT_SERIES_TOL;
use qrecon_core::interpolation::{reconstruct_with_interpolation, InterpolationMode, InterpolationPlan};
use qrecon_core::sim::decompose_polygons;
use qrecon_core::stochastic::integrate_difference;
use qrecon_core::{
    lower_bound_theta, simulate, simulate_recorded, theta_threshold, theta_uniform, theta_zero_wait, Policy, SimConfig,
};

fn policy() -> impl Strategy<Value = Policy> {
    prop_oneof![
        (0.05f64..1.5).prop_map(|rate| Policy::Uniform { rate }),
        (1u32..6).prop_map(|beta| Policy::Threshold { beta }),
        Just(Policy::ZeroWait),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn runs_are_consistent(lambda in 0.1f64..3.0, mu in 0.3f64..3.0, policy in policy(), seed in any::<u64>()) {
        let horizon = 500.0;
        let run = simulate_recorded(&SimConfig::new(lambda, mu, policy, horizon, seed)).unwrap();
        let report = &run.report;

        // D(t) >= 0 without interpolation
        prop_assert!(report.theta_hat >= 0.0);
        prop_assert_eq!(report.theta_hat, report.abs_theta_hat);

        // counting property of the path
        let truth = run.path.to_step_trace();
        for (n, &s) in run.path.arrivals().iter().enumerate() {
            prop_assert_eq!(truth.value_at(s), n as i64 + 1);
        }

        // Lindley recursion and FIFO
        let mut free = 0.0_f64;
        for p in &run.packets {
            prop_assert_eq!(p.wait, (free - p.sample_time).max(0.0));
            prop_assert!(p.service > 0.0);
            prop_assert!(p.delivery_time > free);
            free = p.delivery_time;
        }
        if policy == Policy::ZeroWait {
            prop_assert!(run.packets.iter().all(|p| p.wait == 0.0));
        }

        // the area partition reconciles with the integral
        let integral = report.theta_hat * horizon;
        let split = decompose_polygons(&run.path, &run.packets, policy, horizon).unwrap();
        prop_assert!((split.total() - integral).abs() <= 1e-9 * integral.max(1.0));
        prop_assert!((report.area.total() - integral).abs() <= 1e-9 * integral.max(1.0));

        // interpolated traces stay monotone and agree at deliveries
        for mode in [InterpolationMode::SinglePoint, InterpolationMode::UniformJ] {
            let trace = reconstruct_with_interpolation(&run.packets, &InterpolationPlan { mode, seed }, horizon).unwrap();
            prop_assert!(trace.is_non_decreasing());
            for p in run.delivered() {
                prop_assert_eq!(trace.value_at(p.delivery_time), p.value as i64);
            }
            let area = integrate_difference(&truth, &trace, horizon).unwrap();
            prop_assert!(area.absolute >= area.signed.abs() - 1e-9);
        }
    }

    #[test]
    fn same_seed_same_report(lambda in 0.1f64..2.0, policy in policy(), seed in any::<u64>()) {
        let cfg = SimConfig::new(lambda, 1.0, policy, 300.0, seed);
        prop_assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
    }

    #[test]
    fn closed_forms_are_ordered(lambda in 0.05f64..3.0, mu in 0.2f64..4.0, load in 0.02f64..0.98) {
        // the bound never exceeds what plain reconstruction achieves
        let rate = load * mu;
        let theta = theta_uniform(rate, lambda, mu).unwrap().total();
        let bound = lower_bound_theta(rate, lambda, mu, 4000, DEFAULT_SERIES_TOL).unwrap().value;
        prop_assert!(bound >= 0.0 && bound <= theta * (1.0 + 1e-9));

        let zero_wait = theta_zero_wait(lambda, mu).unwrap().total();
        prop_assert!((zero_wait - 2.0 * lambda / mu).abs() <= 1e-12 * zero_wait);

        // sampling every event is the M/M/1 sojourn scaled by lambda
        if lambda < mu {
            let mm1 = lambda / (mu - lambda);
            prop_assert!((theta_threshold(1, lambda, mu).unwrap().total() - mm1).abs() <= 1e-9 * mm1);
        }
    }
}
