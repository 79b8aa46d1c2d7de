//! Randomized invariants of the transfer matrix and the photon-number channel.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use eitfwm::fock::{
    apply_channel, apply_channel_dilation, coherent_output, CoherentPair, FockDensityMatrix,
    PureTwoModeState,
};
use eitfwm::gates::{hom_probabilities, qubit_probabilities};
use eitfwm::medium::{transfer_matrix, transfer_matrix_expm, MediumParams};

fn od_strategy() -> impl Strategy<Value = f64> {
    0.0..400.0f64
}

fn delta_strategy() -> impl Strategy<Value = f64> {
    0.0..400.0f64
}

proptest! {
    #[test]
    fn transfer_routes_agree(od in od_strategy(), delta in delta_strategy(),
                             phi_c in -PI..PI, phi_d in -PI..PI) {
        let params = MediumParams::new(od, delta).with_phases(phi_c, phi_d);
        let analytic = transfer_matrix(&params).unwrap();
        let expm = transfer_matrix_expm(&params).unwrap();
        prop_assert!(analytic.max_abs_diff(&expm) <= 1e-12);
    }

    #[test]
    fn phase_covariance(od in od_strategy(), delta in delta_strategy(),
                        phi_c in -PI..PI, phi_d in -PI..PI) {
        let base = transfer_matrix(&MediumParams::new(od, delta)).unwrap();
        let tm = transfer_matrix(&MediumParams::new(od, delta).with_phases(phi_c, phi_d)).unwrap();
        let theta = tm.phase_diff();
        prop_assert!((tm.a - base.a).norm() <= 1e-14);
        prop_assert!((tm.d - base.d).norm() <= 1e-14);
        prop_assert!((tm.b - base.b * Complex64::from_polar(1.0, -theta)).norm() <= 1e-13);
        prop_assert!((tm.c - base.c * Complex64::from_polar(1.0, theta)).norm() <= 1e-13);
    }

    #[test]
    fn passivity_and_row_identity(od in od_strategy(), delta in delta_strategy()) {
        let params = MediumParams::new(od, delta);
        let tm = transfer_matrix(&params).unwrap();
        let deficit = 1.0 - tm.a.norm_sqr() - tm.b.norm_sqr();
        prop_assert!(deficit >= -1e-12);
        let closed = (1.0 - (-2.0 * params.absorption_rate()).exp()) / 2.0;
        prop_assert!((deficit - closed).abs() <= 1e-12);
        prop_assert!((tm.loss_probe() - tm.loss_signal()).abs() <= 1e-12);
    }

    #[test]
    fn channel_preserves_trace_and_hermiticity(
        od in od_strategy(), delta in delta_strategy(),
        re in -0.7..0.7f64, im in -0.7..0.7f64,
    ) {
        let tm = transfer_matrix(&MediumParams::new(od, delta)).unwrap();
        let amp = Complex64::new(re, im);
        let rest = (1.0 - amp.norm_sqr()).sqrt();
        let state = PureTwoModeState::from_amplitudes(
            2,
            [((1, 1), amp), ((1, 0), Complex64::new(rest, 0.0))],
        ).unwrap();
        let out = apply_channel(&tm, &FockDensityMatrix::from_pure(&state)).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(out.hermiticity_error() <= 1e-10);
        prop_assert!(out.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn closed_forms_match_channel_diagonals(
        od in 1.0..400.0f64, delta in 1.0..400.0f64,
        u in 0.0..3.0f64, phi_u in -PI..PI,
        phi_c in -PI..PI, phi_d in -PI..PI,
    ) {
        let params = MediumParams::new(od, delta).with_phases(phi_c, phi_d);
        let tm = transfer_matrix(&params).unwrap();

        let qubit = qubit_probabilities(&params, u, phi_u).unwrap();
        let state = PureTwoModeState::two_color_qubit(2, u, phi_u).unwrap();
        let rho = apply_channel(&tm, &FockDensityMatrix::from_pure(&state)).unwrap();
        prop_assert!((qubit.p_1p0s - rho.element(1, 0, 1, 0).re).abs() <= 1e-10);
        prop_assert!((qubit.p_0p1s - rho.element(0, 1, 0, 1).re).abs() <= 1e-10);

        let hom = hom_probabilities(&params).unwrap();
        let pair = apply_channel(&tm, &FockDensityMatrix::fock_state(2, 1, 1).unwrap()).unwrap();
        prop_assert!((hom.p_2p0s - pair.element(2, 0, 2, 0).re).abs() <= 1e-10);
        prop_assert!((hom.p_0p2s - pair.element(0, 2, 0, 2).re).abs() <= 1e-10);
        prop_assert!((hom.p_1p1s - pair.element(1, 1, 1, 1).re).abs() <= 1e-10);
        prop_assert!(
            (hom.p_2p0s + hom.p_0p2s + hom.p_1p1s + hom.loss_sector - 1.0).abs() <= 1e-10
        );
    }

    #[test]
    fn two_photon_diagonals_ignore_phases(
        od in od_strategy(), delta in delta_strategy(),
        phi_c in -PI..PI, phi_d in -PI..PI,
    ) {
        let plain = transfer_matrix(&MediumParams::new(od, delta)).unwrap();
        let phased =
            transfer_matrix(&MediumParams::new(od, delta).with_phases(phi_c, phi_d)).unwrap();
        let rho = FockDensityMatrix::fock_state(2, 1, 1).unwrap();
        let out0 = apply_channel(&plain, &rho).unwrap();
        let out1 = apply_channel(&phased, &rho).unwrap();
        for n_p in 0..=2 {
            for n_s in 0..=2 {
                let d = (out0.element(n_p, n_s, n_p, n_s).re
                    - out1.element(n_p, n_s, n_p, n_s).re).abs();
                prop_assert!(d <= 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn channel_matches_dilation_on_small_inputs(
        od in 1.0..400.0f64, delta in 0.5..400.0f64,
        phi_c in -PI..PI,
        re in -0.7..0.7f64, im in -0.5..0.5f64,
    ) {
        let params = MediumParams::new(od, delta).with_phases(phi_c, 0.0);
        let tm = transfer_matrix(&params).unwrap();
        let amp = Complex64::new(re, im);
        let rest = (1.0 - amp.norm_sqr()).sqrt();
        let state = PureTwoModeState::from_amplitudes(
            3,
            [((2, 0), amp), ((1, 1), Complex64::new(rest, 0.0))],
        ).unwrap();
        let rho = FockDensityMatrix::from_pure(&state);
        let direct = apply_channel(&tm, &rho).unwrap();
        let oracle = apply_channel_dilation(&tm, &rho).unwrap();
        prop_assert!(direct.max_abs_diff(&oracle) <= 1e-10);
    }

    #[test]
    fn coherent_states_stay_coherent(
        od in 1.0..400.0f64, delta in 0.5..400.0f64,
        mag in 0.05..0.3f64, phase in -PI..PI,
    ) {
        let tm = transfer_matrix(&MediumParams::new(od, delta)).unwrap();
        let fields = CoherentPair {
            beta_p: Complex64::from_polar(mag, phase),
            beta_s: Complex64::from_polar(mag, -0.5 * phase),
        };
        let rho = FockDensityMatrix::coherent(8, fields.beta_p, fields.beta_s);
        let out = apply_channel(&tm, &rho).unwrap();
        let exact = coherent_output(&tm, &fields);
        let expect = FockDensityMatrix::coherent(8, exact.beta_p, exact.beta_s);
        prop_assert!(out.max_abs_diff(&expect) <= 1e-7);
    }
}
