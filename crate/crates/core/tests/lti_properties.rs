//! Properties of the Langevin engine and the device builders over random
//! inputs.

use nalgebra::{DMatrix, DVector};
use optomech_squeeze::device::{build_full_model, build_ideal_dpa, build_ideal_dpa_for_stability};
use optomech_squeeze::lti::{frequency_response, output_spectrum, stability_eigenvalues};
use optomech_squeeze::{DeviceParams, LinearLangevinSystem, NoisePort, OutputTap, PhotonBudget};
use proptest::prelude::*;

/// A drift matrix whose symmetric part is negative definite is Hurwitz, so
/// every draw is a valid stable system.
fn stable_system(n: usize, m: usize, seed: Vec<f64>) -> LinearLangevinSystem {
    let mut it = seed.into_iter().cycle();
    let mut next = || it.next().unwrap();
    let l = DMatrix::from_fn(n, n, |_, _| next());
    let k = DMatrix::from_fn(n, n, |_, _| next());
    let skew = &k - k.transpose();
    let drift = skew - &l * l.transpose() - DMatrix::identity(n, n) * 0.1;
    let b = DMatrix::from_fn(n, m, |_, _| next());
    let ports = (0..m).map(|j| NoisePort::new(format!("in{j}"), 0.5 + next().abs())).collect();
    let taps = vec![OutputTap {
        label: "out".into(),
        state_row: DVector::from_fn(n, |_, _| next()),
        feedthrough: DVector::from_fn(m, |_, _| next()),
    }];
    let labels = (0..n).map(|i| format!("s{i}")).collect();
    LinearLangevinSystem::new(labels, drift, b, ports, taps).unwrap()
}

fn random_system() -> impl Strategy<Value = LinearLangevinSystem> {
    (1usize..7, 1usize..5, prop::collection::vec(-2.0f64..2.0, 16..64))
        .prop_map(|(n, m, seed)| stable_system(n, m, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transfer_solves_the_linear_system(sys in random_system(), w in -20.0f64..20.0) {
        let r = frequency_response(&sys, w).unwrap();
        prop_assert!(r.residual(&sys) < 1e-10);
    }

    #[test]
    fn spectra_are_even_and_non_negative(sys in random_system(), w in 0.0f64..20.0) {
        prop_assert!(stability_eigenvalues(&sys).unwrap().stable);
        let s = output_spectrum(&sys, 0, &[-w, w]).unwrap();
        let (a, b) = (s.values()[0], s.values()[1]);
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn ideal_amplifier_oscillates_exactly_past_unity(sigma in 0.0f64..2.0, omega in 0.01f64..1.0) {
        prop_assume!((sigma - 1.0).abs() > 1e-9);
        let p = DeviceParams { sigma, omega_m: omega, budget: PhotonBudget::Signal(1e4), ..DeviceParams::default() };
        let sys = build_ideal_dpa_for_stability(&p).unwrap();
        prop_assert_eq!(stability_eigenvalues(&sys.system).unwrap().stable, sigma < 1.0);
    }

    #[test]
    fn full_model_threshold_moves_with_pump_linewidth(nu in 1e-3f64..3e-2, ns in 10.0f64..1e3, kp in 2.0f64..50.0) {
        let shift = 4.0 * nu * nu * ns / kp;
        let at = |sigma: f64| {
            let p = DeviceParams { sigma, nu, kappa_p: kp, budget: PhotonBudget::Signal(ns), ..DeviceParams::default() };
            stability_eigenvalues(&build_full_model(&p).unwrap().system).unwrap().stable
        };
        prop_assert!(at((1.0 + shift) * (1.0 - 1e-6)));
        prop_assert!(!at((1.0 + shift) * (1.0 + 1e-6)));
    }

    #[test]
    fn phase_quadrature_is_squeezed_at_dc(sigma in 0.01f64..0.99) {
        let p = DeviceParams { sigma, g0: 0.0, budget: PhotonBudget::Signal(1e4), ..DeviceParams::default() };
        let sys = build_ideal_dpa(&p).unwrap();
        let tap = sys.layout.phase_tap;
        let s = output_spectrum(&sys.system, tap, &[0.0]).unwrap().values()[0];
        let expected = 0.5 * ((1.0 - sigma) / (1.0 + sigma)).powi(2);
        prop_assert!((s - expected).abs() <= 1e-12);
    }
}
