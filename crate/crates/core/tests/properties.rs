use std::f64::consts::PI;

use magnomech::oracle::{full_phonon_number, GaussianModel, SpectrumOracle};
use magnomech::steady::{effective_params, solve_steady_state, DriveConfig, SolveMode};
use magnomech::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

prop_compose! {
    fn system()(
        gamma_m in 0.05f64..5.0,
        gamma_a in 0.1f64..5.0,
        delta_a in -2.0f64..2.0,
        delta_m in -2.0f64..2.0,
        g in 0.0f64..1.5,
        g_mag in 0.0f64..0.1,
    ) -> SystemParams {
        SystemParams { gamma_m, gamma_a, delta_a, delta_m, g, g_mag, ..SystemParams::figure2(gamma_m) }
    }
}

prop_compose! {
    fn cooling_system()(
        gamma_m in 0.05f64..5.0,
        gamma_a in 0.2f64..5.0,
        g in 0.0f64..1.0,
        g_mag in 0.01f64..0.1,
        delta_m in 0.5f64..1.5,
    ) -> SystemParams {
        SystemParams { gamma_m, gamma_a, g, g_mag, delta_m, ..SystemParams::figure2(gamma_m) }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn uncoupled_unsqueezed_spectrum_is_lorentzian(
        gamma_m in 0.01f64..10.0,
        delta_m in -3.0f64..3.0,
        omega in -5.0f64..5.0,
    ) {
        let mut p = SystemParams::figure2(gamma_m);
        p.delta_m = delta_m;
        let s = magnon_spectrum(omega, &p, &SqueezingParams::NONE).unwrap();
        let expected = 2.0 * gamma_m / (gamma_m * gamma_m + (delta_m - omega).powi(2));
        prop_assert!((s - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn optimal_squeezing_nulls_stokes_line(p in system()) {
        let p = SystemParams { delta_a: p.omega_b, ..p };
        let sq = optimal_squeezing(&p).unwrap();
        let s_minus = magnon_spectrum(-p.omega_b, &p, &sq).unwrap();
        let s_plus = magnon_spectrum(p.omega_b, &p, &sq).unwrap();
        prop_assert!(s_minus <= 1e-20 + 1e-12 * s_plus, "{} vs {}", s_minus, s_plus);
    }

    #[test]
    fn spectrum_is_two_pi_periodic_in_phase(
        p in system(),
        zeta_abs in 0.0f64..2.0,
        phi in -PI..PI,
        omega in -3.0f64..3.0,
    ) {
        let z = Complex64::from_polar(zeta_abs, phi);
        let shifted = Complex64::from_polar(zeta_abs, phi + 2.0 * PI);
        let a = magnon_spectrum(omega, &p, &SqueezingParams::from_complex(z));
        let b = magnon_spectrum(omega, &p, &SqueezingParams::from_complex(shifted));
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-300)),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn red_detuning_favours_anti_stokes(gamma_m in 0.01f64..10.0, g_mag in 0.001f64..0.5) {
        let mut p = SystemParams::figure2(gamma_m);
        p.g_mag = g_mag;
        let r = scattering_rates(&p, &SqueezingParams::NONE).unwrap();
        prop_assert!(r.a_minus > r.a_plus);
    }

    #[test]
    fn closed_form_matches_oracle(
        p in system(),
        zeta_abs in 0.0f64..2.0,
        phi in -PI..PI,
        omega in -5.0f64..5.0,
    ) {
        let z = Complex64::from_polar(zeta_abs, phi);
        let oracle = SpectrumOracle::new(&p, zero(), z);
        prop_assume!(oracle.is_ok());
        let numeric = oracle.unwrap().eval(omega).unwrap();
        let closed = magnon_spectrum(omega, &p, &SqueezingParams::from_complex(z)).unwrap();
        prop_assert!((closed - numeric).abs() <= 1e-8 * numeric.abs());
    }

    #[test]
    fn decoupled_variances_follow_occupancy(
        gamma_m in 0.05f64..5.0,
        gamma_b in 1e-5f64..0.1,
        n_a in 0.0f64..10.0,
        n_b in 0.0f64..500.0,
        n_m in 0.0f64..10.0,
    ) {
        let mut p = SystemParams::figure2(gamma_m);
        p.g_mag = 0.0;
        p.gamma_b = gamma_b;
        p.n_a = n_a;
        p.n_b = n_b;
        p.n_m = n_m;
        let cov = GaussianModel::new(&p, zero(), zero()).unwrap().covariance(1.0).unwrap();
        for (k, n) in [n_a, n_b, n_m].into_iter().enumerate() {
            prop_assert!((cov.v[(2 * k, 2 * k)] - n - 0.5).abs() < 1e-10);
            prop_assert!((cov.v[(2 * k + 1, 2 * k + 1)] - n - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn stable_covariance_is_physical(p in system(), zeta_abs in 0.0f64..1.5, phi in -PI..PI) {
        let model = GaussianModel::new(&p, Complex64::new(p.g_mag, 0.0), Complex64::from_polar(zeta_abs, phi)).unwrap();
        let cov = model.covariance(1.0);
        prop_assume!(cov.is_ok());
        let cov = cov.unwrap();
        prop_assert!(cov.is_physical(), "margin {}", cov.physicality_margin());
        prop_assert!((cov.v - cov.v.transpose()).amax() < 1e-9 * cov.v.amax());
    }

    #[test]
    fn cooling_below_bath_iff_stokes_below_threshold(p in cooling_system(), zeta_abs in 0.0f64..2.0, phi in -PI..PI) {
        let sq = SqueezingParams::new(zeta_abs, phi).unwrap();
        if let Ok(r) = steady_phonon_number(&p, &sq) {
            prop_assert_eq!(r.n_st < p.n_b, r.a_plus < p.n_b * r.gamma_net);
        }
    }

    #[test]
    fn optimum_is_stable_and_cools(p in cooling_system()) {
        let sq = optimal_squeezing(&p).unwrap();
        prop_assume!(full_phonon_number(&p, &sq).is_ok());
        let r = steady_phonon_number(&p, &sq).unwrap();
        let none = steady_phonon_number(&p, &SqueezingParams::NONE);
        prop_assert!(r.a_plus <= 1e-12 * r.a_minus);
        if let Ok(none) = none {
            prop_assert!(r.n_st <= none.n_st * (1.0 + 1e-12));
        }
    }

    #[test]
    fn approximate_mean_field_is_linear_in_drive(
        e_abs in 0.01f64..2.0,
        scale in 0.1f64..10.0,
        theta in -PI..PI,
        g in 0.0f64..1.0,
    ) {
        let mut p = SystemParams::figure2(0.5);
        p.g = g;
        let d = DriveConfig { e_abs, theta, g0: 1e-3, xi: 1e-3 };
        let d2 = DriveConfig { e_abs: scale * e_abs, ..d };
        let a = solve_steady_state(&p, &d, SolveMode::Approximate).unwrap();
        let b = solve_steady_state(&p, &d2, SolveMode::Approximate).unwrap();
        prop_assert!((b.m_s - a.m_s * scale).norm() <= 1e-12 * b.m_s.norm());
        prop_assert!((b.a_s - a.a_s * scale).norm() <= 1e-12 * b.a_s.norm().max(1e-300));
    }

    #[test]
    fn drive_phase_only_rotates_mean_fields(
        e_abs in 0.01f64..1.0,
        theta in -PI..PI,
        alpha in -PI..PI,
        xi in 0.0f64..0.05,
    ) {
        let p = SystemParams::figure2(0.5);
        let d = DriveConfig { e_abs, theta, g0: 1e-3, xi };
        let d2 = DriveConfig { theta: theta + alpha, ..d };
        let a = solve_steady_state(&p, &d, SolveMode::SelfConsistent).unwrap();
        let b = solve_steady_state(&p, &d2, SolveMode::SelfConsistent).unwrap();
        let rot = Complex64::from_polar(1.0, alpha);
        prop_assert!((b.m_s - a.m_s * rot).norm() <= 1e-8 * a.m_s.norm());
        prop_assert!((b.b_s - a.b_s).norm() <= 1e-8 * a.b_s.norm().max(1e-300));
        let (ea, eb) = (effective_params(&d, &a), effective_params(&d2, &b));
        prop_assert!((ea.zeta_abs - eb.zeta_abs).abs() <= 1e-8 * ea.zeta_abs.max(1e-300));
        if xi > 0.0 {
            let phi = eb.coupling_frame_squeezing().phi;
            prop_assert!((phi + PI / 2.0).abs() < 1e-9, "{}", phi);
        }
    }
}
