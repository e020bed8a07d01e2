//! Command implementations. Each command computes all artifacts in memory;
//! [`execute`] then writes them and the manifest sequentially.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::csvfmt::Table;
use super::manifest::{sha256_hex, FileHash, RunManifest};
use crate::design::{optimal_point, sweep_cooperativity, sweep_noise_map, CurvePoint};
use crate::device::{build_model, validity_report, working_point, DeviceParams, PhotonBudget, WorkingPoint};
use crate::error::{Error, Result};
use crate::lti::output_spectrum;
use crate::metrics::{referred_spectrum_lti, sql_position_spectrum};
use crate::stability::{bisect_threshold, scan_stability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    NoiseMap,
    Sweep,
    Optimize,
    Stability,
    Validate,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::NoiseMap => "noise-map",
            Command::Sweep => "sweep",
            Command::Optimize => "optimize",
            Command::Stability => "stability",
            Command::Validate => "validate",
        }
    }
}

/// A named output file held in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

fn artifact(cfg: &RunConfig, stem: &str, bytes: Vec<u8>) -> Artifact {
    Artifact {
        name: format!("{}{}", cfg.output.prefix, stem),
        bytes,
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

/// Compute the artifacts of `command` without touching the filesystem.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Vec<Artifact>> {
    cfg.check()?;
    match command {
        Command::Spectrum => cmd_spectrum(cfg),
        Command::NoiseMap => cmd_noise_map(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Optimize => cmd_optimize(cfg),
        Command::Stability => cmd_stability(cfg),
        Command::Validate => cmd_validate(cfg),
    }
}

/// Run `command`, write its artifacts and `<prefix>manifest.json` into `dir`.
pub fn execute(command: Command, cfg: &RunConfig, dir: &Path) -> Result<RunManifest> {
    let artifacts = run(command, cfg)?;
    let files = artifacts
        .iter()
        .map(|a| FileHash {
            name: a.name.clone(),
            sha256: sha256_hex(&a.bytes),
            bytes: a.bytes.len(),
        })
        .collect();
    let manifest = RunManifest::new(command, cfg, files)?;
    std::fs::create_dir_all(dir)?;
    for a in &artifacts {
        std::fs::write(dir.join(&a.name), &a.bytes)?;
    }
    std::fs::write(manifest_path(cfg, dir), manifest.to_bytes())?;
    Ok(manifest)
}

pub fn manifest_path(cfg: &RunConfig, dir: &Path) -> PathBuf {
    dir.join(format!("{}manifest.json", cfg.output.prefix))
}

/// Re-run a manifest's command from its echoed config into `dir` and check
/// that every file hashes to the recorded value.
pub fn replay(manifest: &RunManifest, dir: &Path) -> Result<RunManifest> {
    let fresh = execute(manifest.command, &manifest.config, dir)?;
    let problems = fresh.verify(dir)?;
    let mut problems = problems;
    for old in &manifest.files {
        match fresh.files.iter().find(|f| f.name == old.name) {
            Some(f) if f.sha256 == old.sha256 => {}
            Some(_) => problems.push(format!("`{}` differs from the recorded run", old.name)),
            None => problems.push(format!("`{}` was not produced", old.name)),
        }
    }
    if problems.is_empty() {
        Ok(fresh)
    } else {
        Err(Error::Verification(problems.join("; ")))
    }
}

/// Pumped and unpumped (same `n̄_s`) phase-output spectra plus a zoom table
/// around `±Ω` that adds the position-referred decomposition.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let params = cfg.params()?;
    let kind = cfg.analysis.model;
    let norm = cfg.analysis.normalization;
    let grid = cfg.spectrum_grid();
    let pumped = build_model(kind, &params)?;
    let unpumped_params = DeviceParams {
        sigma: 0.0,
        budget: PhotonBudget::Signal(params.n_signal()),
        ..params
    };
    let unpumped = build_model(kind, &unpumped_params)?;
    let header = ["omega_over_kappa", "S_YY_pumped", "S_YY_unpumped", "shot_floor"];
    let digits = cfg.output.precision;
    let k = norm.scale();

    let base = grid.base();
    let s_p = output_spectrum(&pumped.system, pumped.layout.phase_tap, &base)?;
    let s_u = output_spectrum(&unpumped.system, unpumped.layout.phase_tap, &base)?;
    let mut main = Table::new(&header, digits);
    for ((&w, &p), &u) in base.iter().zip(s_p.values()).zip(s_u.values()) {
        main.push_numbers(&[w, k * p, k * u, norm.shot_floor()]);
    }
    let mut out = vec![artifact(cfg, "spectrum.csv", main.to_bytes()?)];

    if grid.zoom_points > 0 {
        let zoom = grid.zoom(params.omega_m, params.gamma_m);
        let z_p = output_spectrum(&pumped.system, pumped.layout.phase_tap, &zoom)?;
        let z_u = output_spectrum(&unpumped.system, unpumped.layout.phase_tap, &zoom)?;
        let referred = if params.g0 > 0.0 && params.n_signal() > 0.0 {
            Some(referred_spectrum_lti(&pumped, &zoom)?)
        } else {
            None
        };
        let sql = sql_position_spectrum(params.gamma_m);
        let mut t = Table::new(
            &[
                "omega_over_kappa",
                "S_YY_pumped",
                "S_YY_unpumped",
                "shot_floor",
                "S_x_meas",
                "S_x_imp",
                "S_x_back",
                "S_x_th",
                "S_x_sql",
            ],
            digits,
        );
        for i in 0..zoom.len() {
            let (meas, imp, back, th) = match &referred {
                Some(r) => (r[i].measured(), r[i].imprecision, r[i].backaction, r[i].thermal),
                None => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
            };
            t.push_numbers(&[
                zoom[i],
                k * z_p.values()[i],
                k * z_u.values()[i],
                norm.shot_floor(),
                meas,
                imp,
                back,
                th,
                sql,
            ]);
        }
        out.push(artifact(cfg, "spectrum_zoom.csv", t.to_bytes()?));
    }
    Ok(out)
}

fn curve_rows(t: &mut Table, name: &str, points: &[CurvePoint]) {
    for p in points {
        let grid = p.grid.unwrap_or(f64::NAN);
        t.push_cells(vec![name.to_string(), t.fmt(p.abscissa), t.fmt(p.analytic), t.fmt(grid)]);
    }
}

/// Long-format added-noise map and the analytic/grid curve comparison.
pub fn cmd_noise_map(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let params = cfg.params()?;
    let n_grid = cfg.grid("n_grid")?;
    let sigma_grid = cfg.grid("sigma_grid")?;
    let map = sweep_noise_map(&params, &n_grid, &sigma_grid)?;
    let digits = cfg.output.precision;
    let mut cells = Table::new(&["n_ratio", "sigma", "s_add", "feasible"], digits);
    for c in &map.cells {
        cells.push_cells(vec![
            cells.fmt(c.n_ratio),
            cells.fmt(c.sigma),
            cells.fmt(c.s_add.unwrap_or(f64::NAN)),
            if c.s_add.is_some() { "1" } else { "0" }.into(),
        ]);
    }
    let mut curves = Table::new(&["curve", "abscissa", "analytic", "grid"], digits);
    curve_rows(&mut curves, "sql_contour", &map.sql_contour);
    curve_rows(&mut curves, "sigma_opt", &map.sigma_opt_locus);
    Ok(vec![
        artifact(cfg, "noise_map.csv", cells.to_bytes()?),
        artifact(cfg, "noise_map_contours.csv", curves.to_bytes()?),
    ])
}

/// Minimal added noise versus threshold cooperativity for three scenarios.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let params = cfg.params()?;
    let c_grid = cfg.grid("c_grid")?;
    let n_ratio = cfg.analysis.n_ratio.unwrap_or(1.0);
    let rows = sweep_cooperativity(&params, &c_grid, n_ratio, cfg.minimize_options())?;
    let mut t = Table::new(
        &["c_thr", "s_add_ideal", "s_add_lossy", "s_add_nosqueeze", "sigma_min_ideal", "sigma_min_lossy"],
        cfg.output.precision,
    );
    for r in rows {
        t.push_numbers(&[
            r.c_thr,
            r.s_add_ideal,
            r.s_add_lossy,
            r.s_add_nosqueeze,
            r.sigma_min_ideal,
            r.sigma_min_lossy,
        ]);
    }
    Ok(vec![artifact(cfg, "sweep.csv", t.to_bytes()?)])
}

#[derive(Serialize)]
struct OptimumOut {
    c_thr: f64,
    omega_m: f64,
    #[serde(flatten)]
    report: crate::design::OptimumReport,
}

pub fn cmd_optimize(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let params = cfg.params()?;
    let report = optimal_point(&params)?;
    let out = OptimumOut {
        c_thr: params.threshold_cooperativity(),
        omega_m: params.omega_m,
        report,
    };
    Ok(vec![artifact(cfg, "optimum.json", json_bytes(&out))])
}

#[derive(Serialize)]
struct ThresholdOut {
    model: crate::device::ModelKind,
    /// `None` when the scanned range has no stable-to-unstable crossing.
    threshold: Option<f64>,
    bisection_tol: f64,
}

/// Eigenvalue scan over `analysis.sigma_range` and the bisected threshold.
pub fn cmd_stability(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let params = cfg.params()?;
    let kind = cfg.analysis.model;
    let sigmas = cfg.grid("sigma_range")?;
    let rows = scan_stability(kind, &params, &sigmas)?;
    let mut t = Table::new(
        &["sigma", "max_real_eigenvalue", "stable", "mech_decay_rate"],
        cfg.output.precision,
    );
    for r in &rows {
        t.push_cells(vec![
            t.fmt(r.sigma),
            t.fmt(r.max_real_eigenvalue),
            if r.stable { "1" } else { "0" }.into(),
            t.fmt(r.mech_decay_rate),
        ]);
    }
    let tol = cfg.analysis.bisection_tol;
    let threshold = match rows.windows(2).find(|w| w[0].stable && !w[1].stable) {
        Some(w) => bisect_threshold(kind, &params, w[0].sigma, w[1].sigma, tol)?,
        None => None,
    };
    let summary = ThresholdOut {
        model: kind,
        threshold,
        bisection_tol: tol,
    };
    Ok(vec![
        artifact(cfg, "stability.csv", t.to_bytes()?),
        artifact(cfg, "stability_threshold.json", json_bytes(&summary)),
    ])
}

#[derive(Serialize)]
struct ValidityOut {
    working_point: Option<WorkingPoint>,
    working_point_note: Option<String>,
    checks: Vec<crate::device::ValidityCheck>,
    all_passed: bool,
}

/// Linearization validity checks and the classical working point.
pub fn cmd_validate(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let params = cfg.params()?;
    let (wp, note) = match working_point(&params) {
        Ok(wp) => (Some(wp), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let checks = validity_report(&params);
    let out = ValidityOut {
        working_point: wp,
        working_point_note: note,
        all_passed: checks.iter().all(|c| c.passed),
        checks,
    };
    Ok(vec![artifact(cfg, "validity.json", json_bytes(&out))])
}
