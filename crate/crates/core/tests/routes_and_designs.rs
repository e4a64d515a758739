use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use scatter1d::amplitudes::{matrix_from_amplitudes, Thresholds};
use scatter1d::design::{design, invisibility_sweep, verify_design};
use scatter1d::io::{sweep_csv, PotentialSpec, SweepRow};
use scatter1d::{classify, scatter, DesignGoal, DesignSpec, IntegratorConfig, Potential, Route};

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cfg() -> IntegratorConfig {
    IntegratorConfig::default()
}

fn bumpy() -> Potential {
    let x: Vec<f64> = (0..=60).map(|i| -1.0 + 3.0 * i as f64 / 60.0).collect();
    let v: Vec<Complex64> = x.iter().map(|&x| cz(1.2 * (2.0 * x).cos(), 0.4 * (x + 1.0) * (2.0 - x))).collect();
    Potential::sampled(&x, &v).unwrap()
}

#[test]
fn all_routes_agree_on_sampled_profile() {
    let p = bumpy();
    for k in [0.4, 1.0, 2.5] {
        let e = scatter(&p, k, Route::Evolution, &cfg()).unwrap();
        let j = scatter(&p, k, Route::Jost, &cfg()).unwrap();
        let s = scatter(&p, k, Route::S, &cfg()).unwrap();
        assert!(e.max_deviation(&j) <= 1e-7, "k = {k}");
        assert!(e.max_deviation(&s) <= 1e-7, "k = {k}");
        let auto = scatter(&p, k, Route::Auto, &cfg()).unwrap();
        assert!(auto.route_deviation.unwrap() <= 1e-8);
    }
}

#[test]
fn parity_swaps_reflections() {
    let p = bumpy();
    let q = p.parity_reflect();
    for k in [0.7, 1.9] {
        let a = scatter(&p, k, Route::Jost, &cfg()).unwrap();
        let b = scatter(&q, k, Route::Jost, &cfg()).unwrap();
        assert!((a.t - b.t).norm() <= 1e-8);
        assert!((a.r_left - b.r_right).norm() <= 1e-8);
        assert!((a.r_right - b.r_left).norm() <= 1e-8);
    }
}

#[test]
fn transfer_matrix_from_solver_amplitudes_is_unimodular() {
    let a = scatter(&bumpy(), 1.3, Route::Jost, &cfg()).unwrap();
    let m = matrix_from_amplitudes(&a).unwrap();
    assert!((m.det() - 1.0).norm() <= 1e-10);
}

#[test]
fn forward_verification_confirms_each_goal() {
    let th = Thresholds::default();
    for (goal, k0l, gamma) in [
        (DesignGoal::Lasing, 0.75 * PI, cz(0.0, 0.0)),
        (DesignGoal::Cpa, 0.75 * PI, cz(0.0, 0.0)),
        (DesignGoal::RightInvisible, 3.0 * PI, cz(1e-6, 0.0)),
        (DesignGoal::RightInvisible, 2.0 * PI, cz(2e-6, 5e-7)),
    ] {
        let result = design(&DesignSpec::from_k0l(k0l, goal, gamma)).unwrap();
        let check = verify_design(&result, Route::Jost, &th, &cfg()).unwrap();
        assert!(check.goal_confirmed, "{goal}: residual {:e}", check.goal_residual);
        assert!(check.goal_residual <= 1e-6);
        if goal == DesignGoal::RightInvisible {
            let flags = check.flags.unwrap();
            assert!(flags.is_right_invisible);
            assert!(!flags.is_left_invisible);
        }
    }
}

#[test]
fn lasing_forward_solve_reports_singularity() {
    let result = design(&DesignSpec::from_k0l(0.75 * PI, DesignGoal::Lasing, cz(0.0, 0.0))).unwrap();
    for route in [Route::Evolution, Route::Jost] {
        let err = scatter(result.potential(), 1.0, route, &cfg()).unwrap_err();
        assert!(matches!(err, scatter1d::ScatterError::SpectralSingularityEncountered { .. }), "{route}: {err}");
    }
}

#[test]
fn off_design_wavenumbers_scatter_normally() {
    let result = design(&DesignSpec::from_k0l(3.0 * PI, DesignGoal::RightInvisible, cz(1e-6, 0.0))).unwrap();
    let a = scatter(result.potential(), 1.05, Route::Auto, &cfg()).unwrap();
    assert!(a.route_deviation.unwrap() <= 1e-8);
    let flags = classify(&a, &Thresholds::default());
    assert!(!flags.is_spectral_singularity);
}

#[test]
fn sweep_transmission_is_locally_periodic() {
    let base: Vec<f64> = (0..8).map(|i| 0.6 + 0.3 * i as f64).collect();
    let shifted: Vec<f64> = base.iter().map(|x| x + PI).collect();
    let a = invisibility_sweep(cz(1e-6, 0.0), &base, &cfg()).unwrap();
    let b = invisibility_sweep(cz(1e-6, 0.0), &shifted, &cfg()).unwrap();
    for (p, q) in a.iter().zip(&b) {
        assert!((p.t - q.t).norm() <= 1e-15);
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let spec = PotentialSpec::from_json(r#"{"kind":"barrier","height":[2.0,-0.5],"length":1.7}"#).unwrap();
    let run = || {
        let p = spec.build().unwrap().potential;
        let rows: Vec<SweepRow> = (1..=5)
            .map(|i| {
                let k = 0.5 * i as f64;
                SweepRow { k, amplitudes: scatter(&p, k, Route::Auto, &cfg()).ok(), status: "ok".into() }
            })
            .collect();
        sweep_csv(&rows)
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn real_barriers_conserve_flux(h in -4.0f64..4.0, l in 0.3f64..3.0, k in 0.3f64..3.0) {
        let p = Potential::barrier(cz(h, 0.0), l).unwrap();
        let a = scatter(&p, k, Route::Jost, &cfg()).unwrap();
        prop_assert!((a.r_left.norm_sqr() + a.t.norm_sqr() - 1.0).abs() <= 1e-8);
        prop_assert!((a.r_right.norm_sqr() + a.t.norm_sqr() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn jost_and_evolution_agree(re in -3.0f64..3.0, im in -2.0f64..2.0, l in 0.3f64..2.5, k in 0.5f64..2.5) {
        let p = Potential::barrier(cz(re, im), l).unwrap();
        let j = scatter(&p, k, Route::Jost, &cfg()).unwrap();
        let e = scatter(&p, k, Route::Evolution, &cfg()).unwrap();
        prop_assert!(j.max_deviation(&e) <= 1e-7);
    }
}
