//! Susceptibilities, output spectra and noise budgets.
//!
//! Every budget has two routes: a closed form and a numeric decomposition of
//! the linear model's output, [`decompose_readout`]. Position spectra are in
//! `x_ZPF²/κ_s`, where the standard quantum limit is `S_SQL = 2/Γ`.

use num_complex::Complex64;
use serde::Serialize;

use crate::device::{build_ideal_dpa, DeviceParams, DeviceSystem, ModelKind};
use crate::error::{Error, Result};
use crate::lti::{self, SpectrumSeries, SpectrumUnits};

/// Intracavity phase-quadrature susceptibility `[−iω + (1+σ)/2]⁻¹`.
pub fn chi_y(omega: f64, sigma: f64) -> Complex64 {
    Complex64::new(0.5 * (1.0 + sigma), -omega).inv()
}

/// Amplitude-quadrature susceptibility `[−iω + (1−σ)/2]⁻¹`.
pub fn chi_x(omega: f64, sigma: f64) -> Complex64 {
    Complex64::new(0.5 * (1.0 - sigma), -omega).inv()
}

/// Mechanical susceptibility in zero-point units, `x̃ = χ̃_M f̃` with the
/// force in `ħ/x_ZPF`: `2Ω/(Ω² − ω² − iωΓ)`, so `|χ̃_M(Ω)| = 2/Γ`.
pub fn chi_m(omega: f64, omega_m: f64, gamma_m: f64) -> Complex64 {
    Complex64::new(2.0 * omega_m, 0.0) / Complex64::new(omega_m * omega_m - omega * omega, -omega * gamma_m)
}

/// Mechanical susceptibility of the split-damping model used by the linear
/// systems: `2Ω/[(Γ/2 − iω)² + Ω²]`.
pub fn chi_m_split(omega: f64, omega_m: f64, gamma_m: f64) -> Complex64 {
    let u = Complex64::new(0.5 * gamma_m, -omega);
    Complex64::new(2.0 * omega_m, 0.0) / (u * u + omega_m * omega_m)
}

/// Thermal position spectrum of the split-damping oscillator.
pub fn thermal_position_spectrum(omega: f64, omega_m: f64, gamma_m: f64, n_th: f64) -> f64 {
    let u = Complex64::new(0.5 * gamma_m, -omega);
    let den = (u * u + omega_m * omega_m).norm_sqr();
    gamma_m * (2.0 * n_th + 1.0) * (u.norm_sqr() + omega_m * omega_m) / den
}

/// `S_SQL = ħ/(mΩΓ)` in `x_ZPF²/κ_s`.
pub fn sql_position_spectrum(gamma_m: f64) -> f64 {
    2.0 / gamma_m
}

fn require_below_threshold(params: &DeviceParams) -> Result<()> {
    params.validate()?;
    if params.sigma >= 1.0 {
        return Err(Error::AboveThreshold { sigma: params.sigma });
    }
    Ok(())
}

fn require_signal_photons(params: &DeviceParams) -> Result<f64> {
    let n_s = params.n_signal();
    if n_s <= 0.0 {
        return Err(Error::InfeasiblePhotonBudget {
            n_signal: n_s,
            deficit: -n_s,
        });
    }
    Ok(n_s)
}

/// Closed-form output phase spectrum of the ideal model.
pub fn output_phase_spectrum_ideal(params: &DeviceParams, grid: &[f64]) -> Result<SpectrumSeries> {
    require_below_threshold(params)?;
    lti::check_grid(grid)?;
    let s = params.sigma;
    let gain2 = params.readout_gain().powi(2);
    let values = grid
        .iter()
        .map(|&w| {
            let cy = chi_y(w, s);
            let shot = 0.5 * (Complex64::new(1.0, 0.0) - cy).norm_sqr();
            if gain2 == 0.0 {
                return shot;
            }
            let s_ff = 0.5 * gain2 * chi_x(w, s).norm_sqr();
            let s_th = thermal_position_spectrum(w, params.omega_m, params.gamma_m, params.n_th);
            let s_back = chi_m_split(w, params.omega_m, params.gamma_m).norm_sqr() * s_ff;
            shot + gain2 * cy.norm_sqr() * (s_th + s_back)
        })
        .collect();
    SpectrumSeries::new(grid.to_vec(), values, SpectrumUnits::Quadrature)
}

/// Refer an ideal-model phase spectrum back to mechanical position,
/// `S_YY/(2n̄_s g₀²|χ_Y|²)`.
pub fn refer_to_input(series: &SpectrumSeries, params: &DeviceParams) -> Result<SpectrumSeries> {
    if series.units() != SpectrumUnits::Quadrature {
        return Err(Error::invalid("refer_to_input expects a quadrature spectrum"));
    }
    require_below_threshold(params)?;
    require_signal_photons(params)?;
    if params.g0 <= 0.0 {
        return Err(Error::invalid("refer_to_input needs g0 > 0"));
    }
    let gain2 = params.readout_gain().powi(2);
    let values = series
        .omega()
        .iter()
        .zip(series.values())
        .map(|(&w, &v)| v / (gain2 * chi_y(w, params.sigma).norm_sqr()))
        .collect();
    SpectrumSeries::new(series.omega().to_vec(), values, SpectrumUnits::PositionZpf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BudgetModel {
    #[serde(rename = "ideal")]
    Ideal,
    #[serde(rename = "adiabatic")]
    Adiabatic,
    #[serde(rename = "full-numeric")]
    FullNumeric,
}

impl BudgetModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BudgetModel::Ideal => "ideal",
            BudgetModel::Adiabatic => "adiabatic",
            BudgetModel::FullNumeric => "full-numeric",
        }
    }
}

impl From<ModelKind> for BudgetModel {
    fn from(m: ModelKind) -> Self {
        match m {
            ModelKind::Ideal => BudgetModel::Ideal,
            ModelKind::Adiabatic => BudgetModel::Adiabatic,
            ModelKind::Full => BudgetModel::FullNumeric,
        }
    }
}

/// Imprecision, backaction and added noise in units of `S_SQL`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub s_imp: f64,
    pub s_back: f64,
    pub s_add: f64,
    pub eval_frequency: f64,
    pub model_tag: BudgetModel,
}

impl NoiseBudget {
    fn new(s_imp: f64, s_back: f64, eval_frequency: f64, model_tag: BudgetModel) -> Self {
        NoiseBudget {
            s_imp,
            s_back,
            s_add: s_imp + s_back,
            eval_frequency,
            model_tag,
        }
    }
}

/// Added-noise budget of the ideal amplifier at `ω = Ω`.
pub fn noise_budget_ideal(params: &DeviceParams) -> Result<NoiseBudget> {
    require_below_threshold(params)?;
    let n_s = require_signal_photons(params)?;
    let c = params.threshold_cooperativity();
    let n_s_ratio = n_s / params.pump_threshold();
    let optical = (1.0 - params.sigma).powi(2) + 4.0 * params.omega_m * params.omega_m;
    let s_imp = optical / (8.0 * c * n_s_ratio);
    Ok(NoiseBudget::new(s_imp, 0.25 / s_imp, params.omega_m, BudgetModel::Ideal))
}

fn lossy_inputs(params: &DeviceParams) -> Result<(f64, f64, f64)> {
    require_below_threshold(params)?;
    let n_s = require_signal_photons(params)?;
    let kappa_loss = params.loss_rate();
    if kappa_loss >= 1.0 {
        return Err(Error::LossExceedsLinewidth { kappa_loss });
    }
    Ok((kappa_loss, 1.0 - kappa_loss, n_s / params.pump_threshold()))
}

/// Closed-form budget with signal losses at `ω = Ω`, in the published
/// adiabatic form. Reduces to [`noise_budget_ideal`] when `κ_loss = 0`.
pub fn noise_budget_lossy(params: &DeviceParams) -> Result<NoiseBudget> {
    let (kl, kin, n_s_ratio) = lossy_inputs(params)?;
    let c = params.threshold_cooperativity();
    let s = params.sigma;
    let om2 = params.omega_m * params.omega_m;
    let s_imp = ((1.0 - s - kl).powi(2) + 4.0 * (kin * kl + om2)) / (8.0 * c * n_s_ratio);
    let s_back = 2.0 * c * n_s_ratio / ((1.0 - s).powi(2) + 4.0 * om2);
    Ok(NoiseBudget::new(s_imp, s_back, params.omega_m, BudgetModel::Adiabatic))
}

/// Closed-form budget obtained by solving the adiabatic Langevin equations
/// exactly (detection through the input port only). Agrees with the
/// numeric adiabatic model; differs from [`noise_budget_lossy`] at `O(κ_loss)`.
pub fn noise_budget_lossy_langevin(params: &DeviceParams) -> Result<NoiseBudget> {
    let (kl, kin, n_s_ratio) = lossy_inputs(params)?;
    let c = params.threshold_cooperativity();
    let s = params.sigma;
    let om2 = params.omega_m * params.omega_m;
    let s_imp = ((1.0 - s - 2.0 * kl).powi(2) + 4.0 * (kin * kl + om2)) / (8.0 * c * n_s_ratio * kin);
    let s_back = 2.0 * c * n_s_ratio / ((1.0 - s).powi(2) + 4.0 * om2);
    Ok(NoiseBudget::new(s_imp, s_back, params.omega_m, BudgetModel::Adiabatic))
}

/// Numeric readout of a built model at one frequency, referred to position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutDecomposition {
    pub omega: f64,
    /// Transfer from `x̃` to the phase output.
    pub signal_gain: Complex64,
    /// Output noise that does not pass through the mechanics, referred to `x̃`.
    pub imprecision: f64,
    /// Position noise driven by optical ports, including any correlation
    /// with the imprecision.
    pub backaction: f64,
    /// Position noise from the mechanical bath.
    pub thermal: f64,
    /// Radiation-pressure force spectrum in `(ħ/x_ZPF)²/κ_s`.
    pub force: f64,
}

impl ReadoutDecomposition {
    /// Measured spectrum referred back to position.
    pub fn measured(&self) -> f64 {
        self.imprecision + self.backaction + self.thermal
    }
}

/// Split the phase-output spectrum of `device` at `omega` into imprecision,
/// backaction and thermal parts.
pub fn decompose_readout(device: &DeviceSystem, omega: f64) -> Result<ReadoutDecomposition> {
    if device.params.g0 <= 0.0 || device.params.n_signal() <= 0.0 {
        return Err(Error::invalid("readout decomposition needs g0 > 0 and n_s > 0"));
    }
    let r = lti::frequency_response(&device.system, omega)?;
    Ok(decompose_response(device, &r))
}

fn decompose_response(device: &DeviceSystem, r: &lti::TransferResponse) -> ReadoutDecomposition {
    let l = &device.layout;
    let ports = device.system.ports();
    let out = r.outputs.row(l.phase_tap);
    let pos = r.states.row(l.position);
    let amp = r.states.row(l.amplitude);
    let k0 = l.mechanical_ports[0];
    let gain = out[k0] / pos[k0];

    let (mut imprecision, mut backaction, mut thermal, mut force) = (0.0, 0.0, 0.0, 0.0);
    for (k, port) in ports.iter().enumerate() {
        let d = port.density;
        let direct = (out[k] - gain * pos[k]) / gain;
        imprecision += direct.norm_sqr() * d;
        if l.mechanical_ports.contains(&k) {
            thermal += pos[k].norm_sqr() * d;
        } else {
            backaction += pos[k].norm_sqr() * d;
        }
        backaction += 2.0 * (pos[k] * direct.conj()).re * d;
        force += amp[k].norm_sqr() * d;
    }
    ReadoutDecomposition {
        omega: r.omega,
        signal_gain: gain,
        imprecision,
        backaction,
        thermal,
        force: force * l.force_gain * l.force_gain,
    }
}

/// Numeric budget of any built model at frequency `omega`, in SQL units.
pub fn noise_budget_lti(device: &DeviceSystem, omega: f64) -> Result<NoiseBudget> {
    if device.params.sigma >= 1.0 {
        return Err(Error::AboveThreshold { sigma: device.params.sigma });
    }
    let d = decompose_readout(device, omega)?;
    let sql = sql_position_spectrum(device.params.gamma_m);
    Ok(NoiseBudget::new(d.imprecision / sql, d.backaction / sql, omega, device.model.into()))
}

/// Phase-output spectrum of a built model referred to position, in `x_ZPF²/κ_s`.
pub fn referred_spectrum_lti(device: &DeviceSystem, grid: &[f64]) -> Result<Vec<ReadoutDecomposition>> {
    lti::check_grid(grid)?;
    if device.params.g0 <= 0.0 || device.params.n_signal() <= 0.0 {
        return Err(Error::invalid("readout decomposition needs g0 > 0 and n_s > 0"));
    }
    lti::map_grid(&device.system, grid, |r| decompose_response(device, r))
}

/// Pointwise product of the imprecision spectrum (`x_ZPF²`) and the force
/// spectrum (`(ħ/x_ZPF)²`) of a built model.
pub fn quantum_limit_product_for(device: &DeviceSystem, grid: &[f64]) -> Result<SpectrumSeries> {
    let values = referred_spectrum_lti(device, grid)?
        .iter()
        .map(|d| d.imprecision * d.force)
        .collect();
    SpectrumSeries::new(grid.to_vec(), values, SpectrumUnits::ZeroPointProduct)
}

/// Imprecision-force product of the ideal model; `1/4` everywhere.
pub fn quantum_limit_product(params: &DeviceParams, grid: &[f64]) -> Result<SpectrumSeries> {
    require_below_threshold(params)?;
    quantum_limit_product_for(&build_ideal_dpa(params)?, grid)
}
