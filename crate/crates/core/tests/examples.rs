//! Every runnable example is compiled in here and checked for its headline
//! result, so the examples cannot rot.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(ideal_spectrum, "ideal_spectrum.rs");
example!(noise_budget, "noise_budget.rs");
example!(optimum, "optimum.rs");
example!(lossy_sweep, "lossy_sweep.rs");
example!(stability_scan, "stability_scan.rs");
example!(validity, "validity.rs");
example!(full_model_convergence, "full_model_convergence.rs");
example!(thermal_area, "thermal_area.rs");
example!(noise_map, "noise_map.rs");
example!(run_config, "run_config.rs");

#[test]
fn ideal_spectrum_is_squeezed_at_dc() {
    let rows = ideal_spectrum::run().unwrap();
    let dc = rows.iter().find(|r| r.0 == 0.0).unwrap();
    assert!((dc.1 - 0.5 / 16.0).abs() < 1e-4);
    assert!(rows.iter().all(|r| r.1 < r.2));
}

#[test]
fn noise_budget_paths_agree() {
    let (closed, numeric) = noise_budget::run().unwrap();
    assert!((closed.s_add - numeric.s_add).abs() < 1e-8);
}

#[test]
fn optimum_values() {
    let r = optimum::run().unwrap();
    assert!((r.sigma_star - 5.0 / 7.0).abs() < 1e-15);
    assert_eq!(r.sigma_opt_curve.len(), 5);
}

#[test]
fn lossy_sweep_ordering() {
    for r in lossy_sweep::run().unwrap() {
        assert!(r.s_add_ideal <= r.s_add_lossy && r.s_add_ideal <= r.s_add_nosqueeze);
    }
}

#[test]
fn stability_thresholds_above_one() {
    for (c, kp, t) in stability_scan::run().unwrap() {
        assert!((t - (1.0 + 4.0 * c * c / kp)).abs() < 1e-9);
    }
}

#[test]
fn validity_checks_pass_for_default_device() {
    assert!(validity::run().unwrap().iter().all(|c| c.passed));
}

#[test]
fn convergence_halves_with_kappa_p() {
    let d = full_model_convergence::run().unwrap();
    for w in d.windows(2) {
        assert!((w[0].1 / w[1].1 - 2.0).abs() < 0.05);
    }
}

#[test]
fn thermal_areas() {
    for (n, a) in thermal_area::run().unwrap() {
        assert!((a / (2.0 * n + 1.0) - 1.0).abs() < 1e-3);
    }
}

#[test]
fn noise_map_has_both_curves() {
    let m = noise_map::run().unwrap();
    assert!(!m.sql_contour.is_empty() && !m.sigma_opt_locus.is_empty());
}

#[test]
fn run_config_produces_files() {
    assert_eq!(run_config::run_example().unwrap(), ["optimum.json", "sweep.csv", "validity.json"]);
}
