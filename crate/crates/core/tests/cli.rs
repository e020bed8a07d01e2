//! End-to-end behaviour of the `optomech-squeeze` binary: exit codes, field
//! paths in rejection messages, manifests and replay.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use optomech_squeeze::io::manifest::sha256_hex;
use optomech_squeeze::io::RunManifest;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_optomech-squeeze"));
    c.env_remove("OPTOMECH_SQUEEZE_OUT");
    c
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run_cmd(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("cfg.json");
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const BASE: &str = r#"{"device": {"sigma": 0.6, "omega_m": 0.2, "gamma_m": 1e-3, "nu": 1e-3,
  "c_thr": 0.1, "n_signal": 200000, "n_th": 0},
  "analysis": {"omega": {"half_span": 2, "points": 41}, "zoom": {"points": 11, "half_width_gamma": 10}}}"#;

#[test]
fn every_subcommand_writes_hashed_outputs() {
    let cases = [
        ("spectrum", "fig2.json", vec!["fig2_spectrum.csv", "fig2_spectrum_zoom.csv"]),
        ("noise-map", "fig3a.json", vec!["fig3a_noise_map.csv", "fig3a_noise_map_contours.csv"]),
        ("sweep", "fig3b.json", vec!["fig3b_sweep.csv"]),
        ("optimize", "optimize.json", vec!["optimum.json"]),
        ("stability", "stability_full.json", vec!["full_stability.csv", "full_stability_threshold.json"]),
        ("validate", "validate.json", vec!["validity.json"]),
    ];
    for (cmd, cfg, files) in cases {
        let out = tempfile::tempdir().unwrap();
        let o = run_cmd(&[cmd, "--config", config(cfg).to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
        let manifest_path = PathBuf::from(String::from_utf8(o.stdout).unwrap().trim());
        let m = RunManifest::load(&manifest_path).unwrap();
        let names: Vec<&str> = m.files.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, files, "{cmd}");
        for f in &m.files {
            let bytes = std::fs::read(out.path().join(&f.name)).unwrap();
            assert_eq!(sha256_hex(&bytes), f.sha256);
            assert_eq!(bytes.len(), f.bytes);
        }
        assert!(m.verify(out.path()).unwrap().is_empty());
    }
}

#[test]
fn manifest_records_derived_quantities() {
    let out = tempfile::tempdir().unwrap();
    let o = run_cmd(&["optimize", "--config", config("optimize.json").to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert!(o.status.success());
    let m = RunManifest::load(&out.path().join("manifest.json")).unwrap();
    let d = &m.derived;
    assert!((d.sigma_star.unwrap() - 5.0 / 7.0).abs() < 1e-15);
    assert!((d.n_star.unwrap() - 0.8142857142857143).abs() < 1e-15);
    assert!((d.suppression.unwrap() - 3.1929824561403506).abs() < 1e-12);
    assert!((d.n_p_thr.unwrap() - 250000.0).abs() < 1e-6);
    assert_eq!(m.validity.len(), 3);
}

#[test]
fn tampered_output_fails_verification_and_replay_restores_it() {
    let out = tempfile::tempdir().unwrap();
    let dir = out.path().to_str().unwrap();
    let o = run_cmd(&["sweep", "--config", config("fig3b.json").to_str().unwrap(), "--out", dir]);
    assert!(o.status.success());
    let manifest = out.path().join("fig3b_manifest.json");
    let m = RunManifest::load(&manifest).unwrap();
    std::fs::write(out.path().join("fig3b_sweep.csv"), b"c_thr\n").unwrap();
    let problems = m.verify(out.path()).unwrap();
    assert_eq!(problems.len(), 1, "{problems:?}");

    let elsewhere = tempfile::tempdir().unwrap();
    let o = run_cmd(&["replay", "--manifest", manifest.to_str().unwrap(), "--out", elsewhere.path().to_str().unwrap(), "--threads", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(m.verify(elsewhere.path()).unwrap().is_empty());
}

#[test]
fn edited_manifest_is_caught_on_replay() {
    let out = tempfile::tempdir().unwrap();
    let o = run_cmd(&["optimize", "--config", config("optimize.json").to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert!(o.status.success());
    let path = out.path().join("manifest.json");
    let mut m = RunManifest::load(&path).unwrap();
    m.files[0].sha256 = "0".repeat(64);
    m.derived.suppression = Some(3.0);
    std::fs::write(&path, m.to_bytes()).unwrap();
    let o = run_cmd(&["replay", "--manifest", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("optimum.json"), "{}", stderr(&o));
    let problems = m.verify(out.path()).unwrap();
    assert!(problems.iter().any(|p| p.contains("suppression")), "{problems:?}");
}

#[test]
fn config_errors_name_the_field_and_write_nothing() {
    let cases = [
        (BASE.replace("\"n_th\": 0", "\"n_thermal\": 0"), "device.n_thermal"),
        (BASE.replace("\"sigma\": 0.6", "\"sigma\": \"0.6\""), "device.sigma"),
        (BASE.replace("\"n_signal\": 200000", "\"n_signal\": 200000, \"n_total\": 1e6"), "device.n_total"),
        (BASE.replace("\"gamma_m\": 1e-3", "\"gamma_m\": 0"), "device.gamma_m"),
        (BASE.replace("\"points\": 41", "\"points\": 41, \"pionts\": 3"), "analysis.omega.pionts"),
        (BASE.replace("\"analysis\"", "\"output\": {\"precision\": 40}, \"analysis\""), "output.precision"),
    ];
    for (text, field) in cases {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write_config(tmp.path(), &text);
        let out = tmp.path().join("out");
        let o = run_cmd(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{field}: {}", stderr(&o));
        assert!(stderr(&o).contains(&format!("`{field}`")), "{field}: {}", stderr(&o));
        assert!(!out.exists(), "{field}: partial output written");
    }
}

#[test]
fn physics_errors_exit_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let above = write_config(tmp.path(), &BASE.replace("\"sigma\": 0.6", "\"sigma\": 1.2"));
    let o = run_cmd(&["spectrum", "--config", above.to_str().unwrap(), "--out", tmp.path().join("a").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("above threshold"));
    assert!(!tmp.path().join("a").exists());

    let deficit = write_config(tmp.path(), &BASE.replace("\"n_signal\": 200000", "\"n_total\": 1000"));
    let o = run_cmd(&["spectrum", "--config", deficit.to_str().unwrap(), "--out", tmp.path().join("b").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("infeasible photon budget"));
}

#[test]
fn missing_grid_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), BASE);
    let o = run_cmd(&["noise-map", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`analysis.n_grid`"), "{}", stderr(&o));
}

#[test]
fn thread_count_and_precision_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), BASE);
    let mut outputs = Vec::new();
    for threads in ["1", "2", "7"] {
        let out = tmp.path().join(format!("t{threads}"));
        let o = run_cmd(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(out.join("spectrum_zoom.csv")).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));

    let out = tmp.path().join("p5");
    let o = run_cmd(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--precision", "5"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    // Phase output of the ideal amplifier at the band edge, ω = 2κ_s.
    let edge = 0.5 * (0.2f64.powi(2) + 4.0) / (0.8f64.powi(2) + 4.0);
    assert_eq!(text.lines().nth(1).unwrap(), format!("-2.0000,{edge:.5},0.50000,0.50000"));
    let m = RunManifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!(m.config.output.precision, 5);
}

#[test]
fn environment_overrides_configured_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), BASE);
    let target = tmp.path().join("from_env");
    let o = bin()
        .args(["optimize", "--config", cfg.to_str().unwrap()])
        .env("OPTOMECH_SQUEEZE_OUT", &target)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(target.join("optimum.json").exists());
}

#[test]
fn stability_reports_threshold_and_constant_phonon_decay() {
    let out = tempfile::tempdir().unwrap();
    let o = run_cmd(&["stability", "--config", config("stability_full.json").to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert!(o.status.success());
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.path().join("full_stability_threshold.json")).unwrap()).unwrap();
    let t = summary["threshold"].as_f64().unwrap();
    assert!((t - (1.0 + 4.0 * 0.09 / 5.0)).abs() < 1e-9, "{t}");
    let mut r = csv::Reader::from_path(out.path().join("full_stability.csv")).unwrap();
    for rec in r.records() {
        let rec = rec.unwrap();
        let decay: f64 = rec[3].parse().unwrap();
        assert!((decay - 1e-3).abs() < 1e-12);
        let sigma: f64 = rec[0].parse().unwrap();
        assert_eq!(&rec[2] == "1", sigma < t);
    }
}

#[test]
fn noise_map_masks_and_single_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let text = BASE.replace(
        "\"analysis\": {",
        "\"analysis\": {\"n_grid\": {\"start\": 0.5, \"stop\": 0.5, \"points\": 1}, \"sigma_grid\": {\"start\": 0.6, \"stop\": 0.9, \"points\": 2}, ",
    );
    let cfg = write_config(tmp.path(), &text);
    let o = run_cmd(&["noise-map", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let map = std::fs::read_to_string(tmp.path().join("noise_map.csv")).unwrap();
    let rows: Vec<&str> = map.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with(",1"), "{}", rows[0]);
    assert_eq!(rows[1], "0.500000000000,0.900000000000,nan,0");
    let contours = std::fs::read_to_string(tmp.path().join("noise_map_contours.csv")).unwrap();
    assert!(!contours.contains("sql_contour"), "{contours}");
}
