//! Pump-parameter scans of the drift-matrix spectrum and threshold bisection.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::device::{build_full_model, build_ideal_dpa_for_stability, DeviceParams, ModelKind};
use crate::error::{Error, Result};
use crate::lti::{stability_eigenvalues, LinearLangevinSystem, StabilityReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityRow {
    pub sigma: f64,
    pub max_real_eigenvalue: f64,
    pub stable: bool,
    /// Phonon-number decay rate `−2 Re λ` of the mechanical eigenvalue.
    pub mech_decay_rate: f64,
}

/// Drift system used for eigenvalue analysis at pump `σ`. The adiabatic
/// model keeps the ideal drift (losses only redistribute the damping), so it
/// shares the ideal builder; neither refuses `σ ≥ 1` here.
pub fn stability_system(kind: ModelKind, params: &DeviceParams) -> Result<LinearLangevinSystem> {
    match kind {
        ModelKind::Ideal | ModelKind::Adiabatic => Ok(build_ideal_dpa_for_stability(params)?.system),
        ModelKind::Full => Ok(build_full_model(params)?.system),
    }
}

/// The eigenvalue nearest `+iΩ`: the mechanical one whenever `Γ ≪ κ_s`.
fn mechanical_eigenvalue(report: &StabilityReport, omega_m: f64) -> Complex64 {
    let target = Complex64::new(0.0, omega_m);
    report
        .eigenvalues
        .iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        .expect("non-empty spectrum")
}

pub fn stability_at(kind: ModelKind, params: &DeviceParams) -> Result<StabilityRow> {
    let report = stability_eigenvalues(&stability_system(kind, params)?)?;
    let mech = mechanical_eigenvalue(&report, params.omega_m);
    Ok(StabilityRow {
        sigma: params.sigma,
        max_real_eigenvalue: report.max_real,
        stable: report.stable,
        mech_decay_rate: -2.0 * mech.re,
    })
}

/// Stability rows over a σ grid, in grid order.
pub fn scan_stability(kind: ModelKind, params: &DeviceParams, sigmas: &[f64]) -> Result<Vec<StabilityRow>> {
    if sigmas.is_empty() {
        return Err(Error::invalid("sigma grid must be non-empty"));
    }
    sigmas
        .par_iter()
        .map(|&s| stability_at(kind, &params.with_sigma(s)))
        .collect()
}

/// Bisect for the pump value where the largest real part crosses zero.
/// `lo` must be stable and `hi` unstable; returns `None` otherwise.
pub fn bisect_threshold(kind: ModelKind, params: &DeviceParams, lo: f64, hi: f64, tol: f64) -> Result<Option<f64>> {
    let max_real = |s: f64| -> Result<f64> {
        Ok(stability_eigenvalues(&stability_system(kind, &params.with_sigma(s))?)?.max_real)
    };
    if !(lo < hi) || max_real(lo)? >= 0.0 || max_real(hi)? < 0.0 {
        return Ok(None);
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if max_real(mid)? < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}
