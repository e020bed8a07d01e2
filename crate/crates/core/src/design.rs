//! Design-space results: photon budget needed to reach the standard quantum
//! limit, the optimal pump parameter, the photon-number suppression factor
//! and numerical minimization of the added noise (with or without losses).
//!
//! Photon numbers are expressed as ratios to the pump threshold `n̄_p^(thr)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::device::{g0_for_cooperativity, DeviceParams, PhotonBudget};
use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::metrics::{noise_budget_ideal, noise_budget_lossy};
use crate::minimize::scan_then_golden;

/// `n̄^SQL(σ)/n̄_p^(thr) = [(1−σ)² + 4Ω²]/(4C_thr) + σ²`.
pub fn n_sql_ratio(sigma: f64, c_thr: f64, omega_m: f64) -> f64 {
    ((1.0 - sigma).powi(2) + 4.0 * omega_m * omega_m) / (4.0 * c_thr) + sigma * sigma
}

pub fn n_sql_of_sigma(sigma: f64, params: &DeviceParams) -> f64 {
    n_sql_ratio(sigma, params.threshold_cooperativity(), params.omega_m)
}

/// Signal photons `n̄_s` that put the ideal amplifier exactly at the SQL
/// (`s_imp = s_back`) at the current `σ`.
pub fn balanced_signal_photons(params: &DeviceParams) -> f64 {
    let s = params.sigma;
    (n_sql_of_sigma(s, params) - s * s) * params.pump_threshold()
}

/// `σ* = 1/(1 + 4C_thr)`.
pub fn sigma_star(c_thr: f64) -> f64 {
    1.0 / (1.0 + 4.0 * c_thr)
}

/// `n̄^SQL_standard/n̄* = (1 + 4Ω²)/(1 − 1/(1+4C_thr) + 4Ω²)`.
pub fn suppression_factor(c_thr: f64, omega_m: f64) -> f64 {
    let w = 4.0 * omega_m * omega_m;
    (1.0 + w) / (1.0 - 1.0 / (4.0 * c_thr + 1.0) + w)
}

/// Optimal pump parameter at fixed `n̄/n̄_p^(thr)`, valid up to `n̄*`.
pub fn sigma_opt_ratio(n_ratio: f64, omega_m: f64) -> f64 {
    let b = 1.0 + n_ratio + 4.0 * omega_m * omega_m;
    let disc = 0.25 * b * b - n_ratio;
    assert!(disc >= 0.0, "negative discriminant for n_ratio {n_ratio}");
    0.5 * b - disc.sqrt()
}

pub fn sigma_opt(n_ratio: f64, params: &DeviceParams) -> Result<f64> {
    if !(n_ratio > 0.0) {
        return Err(Error::invalid(format!("n_ratio must be > 0, got {n_ratio}")));
    }
    Ok(sigma_opt_ratio(n_ratio, params.omega_m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumReport {
    pub sigma_star: f64,
    /// `n̄*/n̄_p^(thr)`.
    pub n_star: f64,
    pub suppression: f64,
    /// `(n̄/n̄_p^(thr), σ^(opt))` pairs up to `n̄*`.
    pub sigma_opt_curve: Vec<(f64, f64)>,
    pub method_tag: Method,
}

pub fn optimal_point_for(c_thr: f64, omega_m: f64, curve_points: usize) -> Result<OptimumReport> {
    if !(c_thr > 0.0) {
        return Err(Error::invalid(format!("C_thr must be > 0, got {c_thr}")));
    }
    let s = sigma_star(c_thr);
    let n_star = n_sql_ratio(s, c_thr, omega_m);
    let suppression = suppression_factor(c_thr, omega_m);
    let sigma_opt_curve = linspace(n_star / curve_points.max(1) as f64, n_star, curve_points)
        .into_iter()
        .map(|n| (n, sigma_opt_ratio(n, omega_m)))
        .collect();
    Ok(OptimumReport {
        sigma_star: s,
        n_star,
        suppression,
        sigma_opt_curve,
        method_tag: Method::Analytic,
    })
}

/// `σ*`, `n̄*` and the suppression factor for the device's `C_thr` and `Ω`.
pub fn optimal_point(params: &DeviceParams) -> Result<OptimumReport> {
    optimal_point_for(params.threshold_cooperativity(), params.omega_m, 50)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetFn {
    Ideal,
    Lossy,
}

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    pub epsilon: f64,
    /// Extra upper bound on σ, e.g. `Some(0.0)` for the unpumped scheme.
    pub sigma_cap: Option<f64>,
    pub scan_points: usize,
    pub tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            epsilon: 1e-6,
            sigma_cap: None,
            scan_points: 64,
            tol: 1e-9,
        }
    }
}

/// Added noise (SQL units) at pump `σ` and fixed total photon ratio; `+∞`
/// where the configuration is infeasible.
pub fn added_noise_at(params: &DeviceParams, n_ratio: f64, sigma: f64, budget: BudgetFn) -> f64 {
    let p = DeviceParams {
        sigma,
        budget: PhotonBudget::Total(n_ratio * params.pump_threshold()),
        ..*params
    };
    let r = match budget {
        BudgetFn::Ideal => noise_budget_ideal(&p),
        BudgetFn::Lossy => noise_budget_lossy(&p),
    };
    r.map(|b| b.s_add).unwrap_or(f64::INFINITY)
}

/// `s_add − 1` of the ideal budget, written as `D²/(8C_thr m A)` with
/// `A = (1−σ)² + 4Ω²`, `m = n̄_s/n̄_p^(thr)` and `D = A − 4C_thr m`. Squaring
/// `D` keeps full relative precision where `s_add` touches 1; near `n̄*` the
/// excess is quartic in the distance to the optimum, so minimizing `s_add`
/// itself could only place `σ` to about `ε^(1/4)`. `+∞` where infeasible.
pub fn ideal_excess_noise(params: &DeviceParams, n_ratio: f64, sigma: f64) -> f64 {
    let p = DeviceParams {
        sigma,
        budget: PhotonBudget::Total(n_ratio * params.pump_threshold()),
        ..*params
    };
    if noise_budget_ideal(&p).is_err() {
        return f64::INFINITY;
    }
    let c = p.threshold_cooperativity();
    let m = p.n_signal() / p.pump_threshold();
    let a = (1.0 - sigma).powi(2) + 4.0 * p.omega_m * p.omega_m;
    let d = a - 4.0 * c * m;
    d * d / (8.0 * c * m * a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Minimum {
    pub sigma: f64,
    pub s_add: f64,
}

/// Minimize the added noise over `σ ∈ [0, min(1−ε, √(n̄/n̄_p^(thr)))]`.
/// For the lossy budget the up-conversion loss follows `n̄_s(σ)`.
pub fn minimize_added_noise(
    params: &DeviceParams,
    n_ratio: f64,
    budget: BudgetFn,
    opts: MinimizeOptions,
) -> Result<Minimum> {
    if !(n_ratio > 0.0) {
        return Err(Error::EmptyFeasibleRange(format!("n_ratio = {n_ratio}")));
    }
    let mut hi = (1.0 - opts.epsilon).min(n_ratio.sqrt());
    if let Some(cap) = opts.sigma_cap {
        hi = hi.min(cap);
    }
    if hi < 0.0 {
        return Err(Error::EmptyFeasibleRange(format!("sigma upper bound {hi} < 0")));
    }
    let (sigma, s_add) = match budget {
        BudgetFn::Ideal => {
            let f = |s: f64| ideal_excess_noise(params, n_ratio, s);
            let (sigma, excess) = scan_then_golden(f, 0.0, hi, opts.scan_points, opts.tol);
            (sigma, 1.0 + excess)
        }
        BudgetFn::Lossy => {
            let f = |s: f64| added_noise_at(params, n_ratio, s, budget);
            scan_then_golden(f, 0.0, hi, opts.scan_points, opts.tol)
        }
    };
    if !s_add.is_finite() {
        return Err(Error::EmptyFeasibleRange(format!(
            "no feasible sigma in [0, {hi}] for n_ratio {n_ratio}"
        )));
    }
    Ok(Minimum { sigma, s_add })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapCell {
    pub n_ratio: f64,
    pub sigma: f64,
    /// `None` for masked cells (`n̄ ≤ σ² n̄_p^(thr)` or `σ ≥ 1`).
    pub s_add: Option<f64>,
}

/// One point of an analytic curve next to its grid-extracted estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub abscissa: f64,
    pub analytic: f64,
    pub grid: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMap {
    /// Row-major: outer loop over `n_grid`, inner over `sigma_grid`.
    pub cells: Vec<MapCell>,
    /// Per σ row: the photon ratio where `s_add` reaches 1.
    pub sql_contour: Vec<CurvePoint>,
    /// Per `n̄` column up to `n̄*`: the σ minimizing `s_add`.
    pub sigma_opt_locus: Vec<CurvePoint>,
}

fn argmin(values: impl Iterator<Item = (f64, Option<f64>)>) -> Option<(f64, f64)> {
    values
        .filter_map(|(x, v)| v.map(|v| (x, v)))
        .fold(None, |best: Option<(f64, f64)>, (x, v)| match best {
            Some((_, bv)) if bv <= v => best,
            _ => Some((x, v)),
        })
}

/// Dense ideal-budget map over `(n̄/n̄_p^(thr), σ)` plus the SQL valley and
/// the optimal-σ ridge, both analytic and extracted from the grid.
pub fn sweep_noise_map(params: &DeviceParams, n_grid: &[f64], sigma_grid: &[f64]) -> Result<NoiseMap> {
    if n_grid.is_empty() || sigma_grid.is_empty() {
        return Err(Error::invalid("noise map grids must be non-empty"));
    }
    params.validate()?;
    let c = params.threshold_cooperativity();
    let cells: Vec<MapCell> = n_grid
        .par_iter()
        .flat_map_iter(|&n| {
            sigma_grid.iter().map(move |&s| {
                let v = added_noise_at(params, n, s, BudgetFn::Ideal);
                MapCell {
                    n_ratio: n,
                    sigma: s,
                    s_add: (s < 1.0 && n > s * s && v.is_finite()).then_some(v),
                }
            })
        })
        .collect();
    let ns = sigma_grid.len();
    let cell = |i: usize, j: usize| &cells[i * ns + j];

    // The added noise never drops below 1; it touches 1 along n̄^SQL(σ).
    let interior = |x: f64, g: &[f64]| x > g[0] && x < g[g.len() - 1];
    let sql_contour = if n_grid.len() > 1 {
        sigma_grid
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < 1.0)
            .map(|(j, &s)| {
                let analytic = n_sql_ratio(s, c, params.omega_m);
                let grid = argmin((0..n_grid.len()).map(|i| (n_grid[i], cell(i, j).s_add)))
                    .map(|(n, _)| n)
                    .filter(|&n| interior(n, n_grid));
                CurvePoint { abscissa: s, analytic, grid }
            })
            .collect()
    } else {
        Vec::new()
    };

    let n_star = n_sql_ratio(sigma_star(c), c, params.omega_m);
    let sigma_opt_locus = if sigma_grid.len() > 1 {
        n_grid
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0.0 && n <= n_star)
            .map(|(i, &n)| {
                let analytic = sigma_opt_ratio(n, params.omega_m);
                let grid = argmin((0..ns).map(|j| (sigma_grid[j], cell(i, j).s_add))).map(|(s, _)| s);
                CurvePoint { abscissa: n, analytic, grid }
            })
            .collect()
    } else {
        Vec::new()
    };

    Ok(NoiseMap {
        cells,
        sql_contour,
        sigma_opt_locus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CooperativityRow {
    pub c_thr: f64,
    pub s_add_ideal: f64,
    pub s_add_lossy: f64,
    pub s_add_nosqueeze: f64,
    pub sigma_min_ideal: f64,
    pub sigma_min_lossy: f64,
}

/// Minimal added noise vs threshold cooperativity for three scenarios:
/// lossless squeezing, squeezing with the template's absorption and pump
/// decay, and no squeezing. `g₀` is rescaled per grid point.
pub fn sweep_cooperativity(
    template: &DeviceParams,
    c_grid: &[f64],
    n_ratio: f64,
    opts: MinimizeOptions,
) -> Result<Vec<CooperativityRow>> {
    if c_grid.is_empty() {
        return Err(Error::invalid("cooperativity grid must be non-empty"));
    }
    template.validate()?;
    c_grid
        .par_iter()
        .map(|&c| {
            if !(c > 0.0) {
                return Err(Error::invalid(format!("C_thr must be > 0, got {c}")));
            }
            let lossy = DeviceParams {
                g0: g0_for_cooperativity(c, template.gamma_m, template.nu),
                ..*template
            };
            let ideal = DeviceParams {
                kappa_abs: 0.0,
                kappa_p: f64::INFINITY,
                ..lossy
            };
            let best_ideal = minimize_added_noise(&ideal, n_ratio, BudgetFn::Lossy, opts)?;
            let best_lossy = minimize_added_noise(&lossy, n_ratio, BudgetFn::Lossy, opts)?;
            let plain = added_noise_at(&ideal, n_ratio, 0.0, BudgetFn::Ideal);
            Ok(CooperativityRow {
                c_thr: c,
                s_add_ideal: best_ideal.s_add,
                s_add_lossy: best_lossy.s_add,
                s_add_nosqueeze: plain,
                sigma_min_ideal: best_ideal.sigma,
                sigma_min_lossy: best_lossy.sigma,
            })
        })
        .collect()
}
