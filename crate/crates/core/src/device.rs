//! Physical parameters and the three linear models of the optomechanical
//! parametric amplifier: ideal, adiabatic with losses, and the full
//! six-variable pump/signal/mechanics system.
//!
//! Units: rates in `κ_s`, positions in `x_ZPF = √(ħ/2mΩ)`, momenta in
//! `p_ZPF = √(mΩħ/2)` so that `x̃ = b + b†`, `p̃ = i(b† − b)` and thermal
//! equilibrium has `⟨x̃²⟩ = 2n_th + 1`. The radiation-pressure force is
//! measured in `ħ/x_ZPF`, `f̃ = √(2n̄_s)·g₀·X`, and enters the momentum row as
//! `2f̃`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lti::{LinearLangevinSystem, NoisePort, OutputTap};

/// How the photon budget is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhotonBudget {
    /// Total circulating photons `n̄ = n̄_s + n̄_p`.
    Total(f64),
    /// Signal-mode photons `n̄_s` directly.
    Signal(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    pub sigma: f64,
    pub omega_m: f64,
    pub gamma_m: f64,
    /// May be `+∞` (pump mode eliminated instantly, no up-conversion loss).
    pub kappa_p: f64,
    pub kappa_abs: f64,
    pub kappa_p_abs: f64,
    pub nu: f64,
    pub g0: f64,
    pub budget: PhotonBudget,
    pub n_th: f64,
}

impl Default for DeviceParams {
    /// Fig. 2 style device: `σ = 0.6`, `Ω = 0.2`, `Γ = 10⁻³`, `C_thr = 0.1`,
    /// `n̄_s = 0.8 n̄_p^(thr)`, lossless, `κ_p = 20`.
    fn default() -> Self {
        let nu = 1e-3;
        let gamma_m = 1e-3;
        DeviceParams {
            sigma: 0.6,
            omega_m: 0.2,
            gamma_m,
            kappa_p: 20.0,
            kappa_abs: 0.0,
            kappa_p_abs: 0.0,
            nu,
            g0: g0_for_cooperativity(0.1, gamma_m, nu),
            budget: PhotonBudget::Signal(0.8 / (4.0 * nu * nu)),
            n_th: 0.0,
        }
    }
}

/// `g₀` giving threshold cooperativity `c_thr` at damping `Γ` and nonlinearity `ν`.
pub fn g0_for_cooperativity(c_thr: f64, gamma_m: f64, nu: f64) -> f64 {
    nu * (c_thr * gamma_m).sqrt()
}

/// Bose occupancy for `k_B T / ħΩ`.
pub fn bose_occupancy(temperature_ratio: f64) -> f64 {
    if temperature_ratio <= 0.0 {
        return 0.0;
    }
    1.0 / (1.0 / temperature_ratio).exp_m1()
}

impl DeviceParams {
    /// Check the parameter-level invariants (not model-specific ones).
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_p > 0.0) {
            return Err(Error::config("kappa_p", format!("must be > 0, got {}", self.kappa_p)));
        }
        let positive = [
            ("omega_m", self.omega_m),
            ("gamma_m", self.gamma_m),
            ("nu", self.nu),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(name, format!("must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("sigma", self.sigma),
            ("g0", self.g0),
            ("n_th", self.n_th),
            ("kappa_abs", self.kappa_abs),
            ("kappa_p_abs", self.kappa_p_abs),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(name, format!("must be >= 0, got {v}")));
            }
        }
        if self.kappa_abs >= 1.0 {
            return Err(Error::config("kappa_abs", "must be < kappa_s = 1"));
        }
        match self.budget {
            PhotonBudget::Total(n) if !(n >= 0.0) || !n.is_finite() => {
                return Err(Error::config("n_total", format!("must be >= 0, got {n}")))
            }
            PhotonBudget::Signal(n) if !(n >= 0.0) || !n.is_finite() => {
                return Err(Error::config("n_signal", format!("must be >= 0, got {n}")))
            }
            _ => {}
        }
        let n_s = self.n_signal();
        if n_s < 0.0 {
            return Err(Error::InfeasiblePhotonBudget {
                n_signal: n_s,
                deficit: -n_s,
            });
        }
        Ok(())
    }

    /// Copy with a different pump parameter, keeping the photon budget kind.
    pub fn with_sigma(&self, sigma: f64) -> Self {
        DeviceParams { sigma, ..*self }
    }

    /// `n̄_p^(thr) = (κ_s/2ν)²`.
    pub fn pump_threshold(&self) -> f64 {
        let r = 0.5 / self.nu;
        r * r
    }

    /// `n̄_p = σ² n̄_p^(thr)`.
    pub fn n_pump(&self) -> f64 {
        self.sigma * self.sigma * self.pump_threshold()
    }

    /// `n̄_s`; negative when a total budget cannot cover the pump photons.
    pub fn n_signal(&self) -> f64 {
        match self.budget {
            PhotonBudget::Signal(n) => n,
            PhotonBudget::Total(n) => n - self.n_pump(),
        }
    }

    /// `n̄ = n̄_s + n̄_p`.
    pub fn n_total(&self) -> f64 {
        match self.budget {
            PhotonBudget::Total(n) => n,
            PhotonBudget::Signal(n) => n + self.n_pump(),
        }
    }

    /// `n̄/n̄_p^(thr)`.
    pub fn n_ratio(&self) -> f64 {
        self.n_total() / self.pump_threshold()
    }

    /// `C_thr = g₀²κ_s/(Γν²)`.
    pub fn threshold_cooperativity(&self) -> f64 {
        self.g0 * self.g0 / (self.gamma_m * self.nu * self.nu)
    }

    /// Same quantity written as `4g₀² n̄_p^(thr)/(Γκ_s)`.
    pub fn threshold_cooperativity_via_threshold(&self) -> f64 {
        4.0 * self.g0 * self.g0 * self.pump_threshold() / self.gamma_m
    }

    /// Photon up-conversion loss `4ν² n̄_s/κ_p`.
    pub fn upconversion_rate(&self) -> f64 {
        4.0 * self.nu * self.nu * self.n_signal() / self.kappa_p
    }

    /// `κ_s^(loss) = κ_s^(abs) + 4ν² n̄_s/κ_p`.
    pub fn loss_rate(&self) -> f64 {
        self.kappa_abs + self.upconversion_rate()
    }

    /// Optomechanical rate `√(2n̄_s)·g₀` coupling `x̃` into the phase
    /// quadrature; also the force `f̃` per unit amplitude quadrature.
    pub fn readout_gain(&self) -> f64 {
        (2.0 * self.n_signal()).sqrt() * self.g0
    }

    /// Symmetrized density of each mechanical bath port (`√Γ` weight).
    pub fn mechanical_port_density(&self) -> f64 {
        2.0 * self.n_th + 1.0
    }
}

/// `n̄_p^(thr)` for a given nonlinearity.
pub fn pump_threshold(params: &DeviceParams) -> f64 {
    params.pump_threshold()
}

/// Both forms of the threshold cooperativity, checked against each other.
pub fn threshold_cooperativity(params: &DeviceParams) -> f64 {
    let direct = params.threshold_cooperativity();
    let via = params.threshold_cooperativity_via_threshold();
    debug_assert!((direct - via).abs() <= 1e-12 * direct.abs().max(1e-300));
    direct
}

pub fn loss_rate(params: &DeviceParams) -> f64 {
    params.loss_rate()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ideal,
    Adiabatic,
    Full,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Ideal => "ideal",
            ModelKind::Adiabatic => "adiabatic",
            ModelKind::Full => "full",
        }
    }
}

/// Where the named variables live inside a built system.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub amplitude: usize,
    pub phase: usize,
    pub position: usize,
    pub momentum: usize,
    pub phase_tap: usize,
    pub mechanical_ports: [usize; 2],
    /// Radiation-pressure force `f̃ = force_gain · X` in `ħ/x_ZPF`.
    pub force_gain: f64,
}

/// A built model plus the bookkeeping needed to read noise budgets from it.
#[derive(Debug, Clone)]
pub struct DeviceSystem {
    pub model: ModelKind,
    pub params: DeviceParams,
    pub system: LinearLangevinSystem,
    pub layout: Layout,
}

struct Builder {
    labels: Vec<String>,
    ports: Vec<NoisePort>,
    drift: Vec<(usize, usize, f64)>,
    coupling: Vec<(usize, usize, f64)>,
}

impl Builder {
    fn new(labels: &[&str]) -> Self {
        Builder {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            ports: Vec::new(),
            drift: Vec::new(),
            coupling: Vec::new(),
        }
    }

    fn port(&mut self, label: &str, density: f64, state: usize, weight: f64) -> usize {
        self.ports.push(NoisePort::new(label, density));
        let k = self.ports.len() - 1;
        self.coupling.push((state, k, weight));
        k
    }

    fn a(&mut self, i: usize, j: usize, v: f64) {
        self.drift.push((i, j, v));
    }

    fn finish(self, tap_state: usize, tap_port: usize, tap_weight: f64) -> Result<LinearLangevinSystem> {
        let n = self.labels.len();
        let m = self.ports.len();
        let mut drift = DMatrix::zeros(n, n);
        for (i, j, v) in self.drift {
            drift[(i, j)] += v;
        }
        let mut b = DMatrix::zeros(n, m);
        for (i, k, v) in self.coupling {
            b[(i, k)] += v;
        }
        let mut state_row = DVector::zeros(n);
        state_row[tap_state] = tap_weight;
        let mut feedthrough = DVector::zeros(m);
        feedthrough[tap_port] = 1.0;
        let tap = OutputTap {
            label: "Y_out".into(),
            state_row,
            feedthrough,
        };
        LinearLangevinSystem::new(self.labels, drift, b, self.ports, vec![tap])
    }
}

fn check_noise_regime(params: &DeviceParams) -> Result<()> {
    params.validate()?;
    if params.sigma >= 1.0 {
        return Err(Error::AboveThreshold { sigma: params.sigma });
    }
    Ok(())
}

fn check_signal(params: &DeviceParams) -> Result<()> {
    if params.g0 > 0.0 && params.n_signal() <= 0.0 {
        let n_s = params.n_signal();
        return Err(Error::InfeasiblePhotonBudget {
            n_signal: n_s,
            deficit: -n_s,
        });
    }
    Ok(())
}

/// Mechanical block in the split-damping form shared by every model.
fn add_mechanics(b: &mut Builder, params: &DeviceParams, pos: usize, mom: usize, amp: usize) -> [usize; 2] {
    let om = params.omega_m;
    let half_gamma = 0.5 * params.gamma_m;
    b.a(pos, pos, -half_gamma);
    b.a(pos, mom, om);
    b.a(mom, pos, -om);
    b.a(mom, mom, -half_gamma);
    b.a(mom, amp, 2.0 * params.readout_gain());
    let d = params.mechanical_port_density();
    let w = params.gamma_m.sqrt();
    [b.port("xi_x", d, pos, w), b.port("xi_p", d, mom, w)]
}

fn ideal_like(params: &DeviceParams, kappa_loss: f64) -> Result<DeviceSystem> {
    let (amp, phase, pos, mom) = (0, 1, 2, 3);
    let mut b = Builder::new(&["X", "Y", "x", "p"]);
    let s = params.sigma;
    b.a(amp, amp, -0.5 * (1.0 - s));
    b.a(phase, phase, -0.5 * (1.0 + s));
    b.a(phase, pos, params.readout_gain());
    let w_in = (1.0 - kappa_loss).sqrt();
    let w_loss = kappa_loss.sqrt();
    b.port("X_in", 0.5, amp, w_in);
    let y_in = b.port("Y_in", 0.5, phase, w_in);
    b.port("X_loss", 0.5, amp, w_loss);
    b.port("Y_loss", 0.5, phase, w_loss);
    let mech = add_mechanics(&mut b, params, pos, mom, amp);
    let system = b.finish(phase, y_in, w_in)?;
    Ok(DeviceSystem {
        model: if kappa_loss > 0.0 { ModelKind::Adiabatic } else { ModelKind::Ideal },
        params: *params,
        layout: Layout {
            amplitude: amp,
            phase,
            position: pos,
            momentum: mom,
            phase_tap: 0,
            mechanical_ports: mech,
            force_gain: params.readout_gain(),
        },
        system,
    })
}

/// Ideal lossless DPA coupled to the mechanics (states `X, Y, x̃, p̃`).
pub fn build_ideal_dpa(params: &DeviceParams) -> Result<DeviceSystem> {
    check_noise_regime(params)?;
    check_signal(params)?;
    build_ideal_dpa_for_stability(params)
}

/// Ideal model without the below-threshold check, for eigenvalue scans only.
pub fn build_ideal_dpa_for_stability(params: &DeviceParams) -> Result<DeviceSystem> {
    params.validate()?;
    check_signal(params)?;
    let mut sys = ideal_like(params, 0.0)?;
    sys.system = sys.system.prune_silent_ports();
    sys.layout.mechanical_ports = [
        sys.system.port_index("xi_x").expect("xi_x"),
        sys.system.port_index("xi_p").expect("xi_p"),
    ];
    sys.model = ModelKind::Ideal;
    Ok(sys)
}

/// Pump mode eliminated: signal loss `κ_s^(loss)` enters through its own
/// ports, total quadrature damping stays `(1 ± σ)κ_s/2`.
pub fn build_adiabatic_model(params: &DeviceParams) -> Result<DeviceSystem> {
    check_noise_regime(params)?;
    check_signal(params)?;
    let kappa_loss = params.loss_rate();
    if kappa_loss >= 1.0 {
        return Err(Error::LossExceedsLinewidth { kappa_loss });
    }
    let mut sys = ideal_like(params, kappa_loss)?;
    sys.model = ModelKind::Adiabatic;
    Ok(sys)
}

/// Six-variable linearized model (`Y_p, X_p, Y, X, x̃, p̃`) with ten noise
/// ports. The radiation-pressure detuning is not included.
pub fn build_full_model(params: &DeviceParams) -> Result<DeviceSystem> {
    params.validate()?;
    check_signal(params)?;
    if !params.kappa_p.is_finite() {
        return Err(Error::invalid("the full model needs a finite kappa_p"));
    }
    let kappa_p_in = params.kappa_p - params.kappa_p_abs;
    if kappa_p_in < 0.0 {
        return Err(Error::invalid(format!(
            "kappa_p_in = kappa_p - kappa_p_abs = {kappa_p_in} < 0"
        )));
    }
    let kappa_s_in = 1.0 - params.kappa_abs;
    let (yp, xp, phase, amp, pos, mom) = (0, 1, 2, 3, 4, 5);
    let mut b = Builder::new(&["Y_p", "X_p", "Y", "X", "x", "p"]);
    let s = params.sigma;
    let c = params.nu * params.n_signal().max(0.0).sqrt();
    let half_kp = 0.5 * params.kappa_p;

    b.a(yp, yp, -half_kp);
    b.a(yp, phase, -c);
    b.a(xp, xp, -half_kp);
    b.a(xp, amp, -c);
    b.a(phase, phase, -0.5 * (1.0 + s));
    b.a(phase, yp, c);
    b.a(phase, pos, params.readout_gain());
    b.a(amp, amp, -0.5 * (1.0 - s));
    b.a(amp, xp, c);

    b.port("Y_p_in", 0.5, yp, kappa_p_in.sqrt());
    b.port("Y_p_abs", 0.5, yp, params.kappa_p_abs.sqrt());
    b.port("X_p_in", 0.5, xp, kappa_p_in.sqrt());
    b.port("X_p_abs", 0.5, xp, params.kappa_p_abs.sqrt());
    let y_in = b.port("Y_in", 0.5, phase, kappa_s_in.sqrt());
    b.port("Y_abs", 0.5, phase, params.kappa_abs.sqrt());
    b.port("X_in", 0.5, amp, kappa_s_in.sqrt());
    b.port("X_abs", 0.5, amp, params.kappa_abs.sqrt());
    let mech = add_mechanics(&mut b, params, pos, mom, amp);
    let system = b.finish(phase, y_in, kappa_s_in.sqrt())?;
    Ok(DeviceSystem {
        model: ModelKind::Full,
        params: *params,
        layout: Layout {
            amplitude: amp,
            phase,
            position: pos,
            momentum: mom,
            phase_tap: 0,
            mechanical_ports: mech,
            force_gain: params.readout_gain(),
        },
        system,
    })
}

/// Build the requested model.
pub fn build_model(kind: ModelKind, params: &DeviceParams) -> Result<DeviceSystem> {
    match kind {
        ModelKind::Ideal => build_ideal_dpa(params),
        ModelKind::Adiabatic => build_adiabatic_model(params),
        ModelKind::Full => build_full_model(params),
    }
}

/// Classical stationary amplitudes and the drives that sustain them.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WorkingPoint {
    pub alpha_p: f64,
    pub alpha_s: f64,
    pub beta: f64,
    pub alpha_p_in: f64,
    pub alpha_s_in_re: f64,
    pub alpha_s_in_im: f64,
    pub detuning_ratio: f64,
    /// `⟨X² + Y²⟩/2` of the ideal model; `None` at or above threshold.
    pub fluct_photons: Option<f64>,
}

impl WorkingPoint {
    pub fn alpha_s_in(&self) -> Complex64 {
        Complex64::new(self.alpha_s_in_re, self.alpha_s_in_im)
    }
}

/// `⟨X² + Y²⟩/2 = [1/(2(1−σ)) + 1/(2(1+σ))]/2` below threshold.
pub fn fluctuation_photons(sigma: f64) -> Option<f64> {
    (sigma.abs() < 1.0).then(|| 0.5 * (0.5 / (1.0 - sigma) + 0.5 / (1.0 + sigma)))
}

/// Invert the classical stationary equations: amplitudes to required drives.
pub fn working_point(params: &DeviceParams) -> Result<WorkingPoint> {
    params.validate()?;
    let kappa_p_in = params.kappa_p - params.kappa_p_abs;
    let kappa_s_in = 1.0 - params.kappa_abs;
    if !(kappa_p_in > 0.0) || !kappa_p_in.is_finite() {
        return Err(Error::invalid("kappa_p_in must be finite and > 0 for a working point"));
    }
    let n_s = params.n_signal();
    let alpha_p = params.sigma / (2.0 * params.nu);
    let alpha_s = n_s.sqrt();
    let detuning = 2.0 * params.g0 * params.g0 * n_s / params.omega_m;
    let alpha_p_in = (params.kappa_p * alpha_p + params.nu * alpha_s * alpha_s) / (2.0 * kappa_p_in.sqrt());
    let s_in = Complex64::new(0.5 * alpha_s * (1.0 - params.sigma), -detuning * alpha_s) / kappa_s_in.sqrt();
    Ok(WorkingPoint {
        alpha_p,
        alpha_s,
        beta: params.g0 * n_s / params.omega_m,
        alpha_p_in,
        alpha_s_in_re: s_in.re,
        alpha_s_in_im: s_in.im,
        detuning_ratio: detuning,
        fluct_photons: fluctuation_photons(params.sigma),
    })
}

/// Residuals of the three classical stationary equations at a working point.
pub fn stationary_residuals(params: &DeviceParams, wp: &WorkingPoint) -> [f64; 3] {
    let kappa_p_in = params.kappa_p - params.kappa_p_abs;
    let kappa_s_in = 1.0 - params.kappa_abs;
    let n_s = wp.alpha_s * wp.alpha_s;
    let pump = -(params.kappa_p * wp.alpha_p + params.nu * wp.alpha_s * wp.alpha_s) / 2.0
        + kappa_p_in.sqrt() * wp.alpha_p_in;
    let a_s = Complex64::new(wp.alpha_s, 0.0);
    let signal = Complex64::i() * 2.0 * params.g0 * params.g0 * n_s / params.omega_m * a_s
        - (a_s - 2.0 * params.nu * a_s.conj() * wp.alpha_p) / 2.0
        + kappa_s_in.sqrt() * wp.alpha_s_in();
    let mech = Complex64::new(0.0, -params.omega_m * wp.beta) + Complex64::new(0.0, params.g0 * n_s);
    [pump.abs(), signal.norm(), mech.norm()]
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ValidityCheck {
    pub name: &'static str,
    pub ratio: f64,
    pub threshold: f64,
    pub passed: bool,
    pub note: String,
}

/// Configurable thresholds for [`validity_report`].
#[derive(Debug, Clone, Copy)]
pub struct ValidityThresholds {
    pub detuning: f64,
    pub linearization: f64,
    pub nonlinearity: f64,
}

impl Default for ValidityThresholds {
    fn default() -> Self {
        ValidityThresholds {
            detuning: 0.01,
            linearization: 0.01,
            nonlinearity: 0.1,
        }
    }
}

pub fn validity_report(params: &DeviceParams) -> Vec<ValidityCheck> {
    validity_report_with(params, ValidityThresholds::default())
}

/// Annotate (never reject) a configuration with the linearization checks.
pub fn validity_report_with(params: &DeviceParams, th: ValidityThresholds) -> Vec<ValidityCheck> {
    let n_s = params.n_signal();
    let detuning = 2.0 * params.g0 * params.g0 * n_s / params.omega_m;
    let mut checks = vec![ValidityCheck {
        name: "detuning",
        ratio: detuning,
        threshold: th.detuning,
        passed: detuning < th.detuning,
        note: "radiation-pressure detuning 2 g0^2 n_s / Omega relative to kappa_s".into(),
    }];
    checks.push(match fluctuation_photons(params.sigma) {
        Some(f) if n_s > 0.0 => {
            let ratio = f / n_s;
            ValidityCheck {
                name: "linearization",
                ratio,
                threshold: th.linearization,
                passed: ratio < th.linearization,
                note: format!("fluctuation photons {f} relative to n_s"),
            }
        }
        Some(f) => ValidityCheck {
            name: "linearization",
            ratio: f64::INFINITY,
            threshold: th.linearization,
            passed: false,
            note: format!("fluctuation photons {f} with no signal photons"),
        },
        None => ValidityCheck {
            name: "linearization",
            ratio: f64::INFINITY,
            threshold: th.linearization,
            passed: false,
            note: "fluctuation photons undefined at or above threshold".into(),
        },
    });
    let nl = params.nu / params.omega_m;
    checks.push(ValidityCheck {
        name: "nonlinearity",
        ratio: nl,
        threshold: th.nonlinearity,
        passed: nl < th.nonlinearity,
        note: "optical nonlinearity nu relative to Omega".into(),
    });
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig3b(sigma: f64) -> DeviceParams {
        let nu = 1e-3;
        DeviceParams {
            sigma,
            omega_m: 0.1,
            gamma_m: 1e-5,
            kappa_p: 20.0,
            kappa_abs: 0.01,
            kappa_p_abs: 0.0,
            nu,
            g0: g0_for_cooperativity(0.1, 1e-5, nu),
            budget: PhotonBudget::Total(1.0 / (4.0 * nu * nu)),
            n_th: 0.0,
        }
    }

    #[test]
    fn pump_threshold_values() {
        let mut p = DeviceParams { nu: 0.5, ..DeviceParams::default() };
        assert_eq!(pump_threshold(&p), 1.0);
        p.nu = 1e-3;
        assert_relative_eq!(pump_threshold(&p), 2.5e5, max_relative = 1e-14);
        p.nu = 0.01;
        assert_relative_eq!(pump_threshold(&p), 2500.0, max_relative = 1e-14);
    }

    #[test]
    fn threshold_cooperativity_values() {
        let mut p = DeviceParams { g0: 0.3, nu: 0.3, gamma_m: 1.0, ..DeviceParams::default() };
        assert_relative_eq!(threshold_cooperativity(&p), 1.0, max_relative = 1e-15);
        p.g0 = 1e-6;
        p.nu = 1e-3;
        p.gamma_m = 1e-5;
        assert_relative_eq!(threshold_cooperativity(&p), 0.1, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn cooperativity_forms_agree(g0 in 1e-8f64..1e-2, nu in 1e-5f64..1.0, gamma in 1e-7f64..1.0) {
            let p = DeviceParams { g0, nu, gamma_m: gamma, ..DeviceParams::default() };
            let a = p.threshold_cooperativity();
            let b = p.threshold_cooperativity_via_threshold();
            prop_assert!((a - b).abs() <= 1e-14 * a);
        }

        #[test]
        fn photon_bookkeeping(n in 1e3f64..1e7, sigma in 0.0f64..0.99) {
            let p = DeviceParams { sigma, budget: PhotonBudget::Total(n), ..DeviceParams::default() };
            prop_assume!(p.n_signal() >= 0.0);
            prop_assert!((p.n_signal() + sigma * sigma * p.pump_threshold() - n).abs() <= 1e-14 * n);
        }
    }

    #[test]
    fn loss_rate_values() {
        let mut p = fig3b(0.5);
        p.budget = PhotonBudget::Signal(0.0);
        assert_eq!(loss_rate(&p), 0.01);
        let p = fig3b(0.5);
        assert_relative_eq!(p.n_signal() / p.pump_threshold(), 0.75, max_relative = 1e-14);
        assert_relative_eq!(loss_rate(&p), 0.0475, max_relative = 1e-12);
        let doubled = DeviceParams { kappa_p: 40.0, ..p };
        assert_relative_eq!(doubled.upconversion_rate(), 0.5 * p.upconversion_rate(), max_relative = 1e-15);
    }

    #[test]
    fn ideal_model_structure() {
        let sys = build_ideal_dpa(&DeviceParams::default()).unwrap();
        let a = sys.system.drift();
        assert_relative_eq!(a[(0, 0)], -0.2, epsilon = 1e-15);
        assert_relative_eq!(a[(1, 1)], -0.8, epsilon = 1e-15);
        assert_eq!(sys.system.port_count(), 4);
        assert_eq!(sys.system.state_labels(), &["X", "Y", "x", "p"]);
        // force row carries twice the readout gain
        assert_relative_eq!(a[(3, 0)], 2.0 * a[(1, 2)], max_relative = 1e-15);
    }

    #[test]
    fn ideal_sigma_zero_is_plain_cavity() {
        let p = DeviceParams { sigma: 0.0, g0: 0.0, ..DeviceParams::default() };
        let sys = build_ideal_dpa(&p).unwrap();
        let a = sys.system.drift();
        let b = sys.system.input_coupling();
        assert_eq!(a[(0, 0)], a[(1, 1)]);
        assert_eq!(b.column(0)[0], b.column(1)[1]);
    }

    #[test]
    fn ideal_rejects_above_threshold_and_deficit() {
        let p = DeviceParams { sigma: 1.0, ..DeviceParams::default() };
        assert!(matches!(build_ideal_dpa(&p), Err(Error::AboveThreshold { .. })));
        let p = DeviceParams { budget: PhotonBudget::Total(10.0), ..DeviceParams::default() };
        assert!(matches!(build_ideal_dpa(&p), Err(Error::InfeasiblePhotonBudget { .. })));
    }

    #[test]
    fn adiabatic_lossless_equals_ideal() {
        let p = DeviceParams { kappa_p: f64::INFINITY, ..DeviceParams::default() };
        let ideal = build_ideal_dpa(&p).unwrap();
        let adiabatic = build_adiabatic_model(&p).unwrap();
        assert_eq!(adiabatic.system.port_count(), 6);
        assert_eq!(adiabatic.system.prune_silent_ports(), ideal.system);
    }

    #[test]
    fn adiabatic_port_weights() {
        let sys = build_adiabatic_model(&fig3b(0.5)).unwrap();
        let b = sys.system.input_coupling();
        let y = sys.layout.phase;
        let y_in = sys.system.port_index("Y_in").unwrap();
        let y_loss = sys.system.port_index("Y_loss").unwrap();
        assert_relative_eq!(b[(y, y_loss)], 0.0475f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(b[(y, y_in)], 0.9525f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn adiabatic_loss_exceeding_linewidth() {
        let p = DeviceParams { kappa_abs: 0.5, kappa_p: 0.1, ..fig3b(0.5) };
        assert!(matches!(build_adiabatic_model(&p), Err(Error::LossExceedsLinewidth { .. })));
    }

    #[test]
    fn damping_and_fluctuation_dissipation_bookkeeping() {
        for sigma in [0.0, 0.3, 0.6, 0.9] {
            let p = fig3b(sigma);
            for sys in [build_ideal_dpa(&p).unwrap(), build_adiabatic_model(&p).unwrap(), build_full_model(&p).unwrap()] {
                let a = sys.system.drift();
                let b = sys.system.input_coupling();
                let (x, y) = (sys.layout.amplitude, sys.layout.phase);
                assert_relative_eq!(a[(y, y)], -(1.0 + sigma) / 2.0, epsilon = 1e-15);
                assert_relative_eq!(a[(x, x)], -(1.0 - sigma) / 2.0, epsilon = 1e-15);
                for row in [x, y] {
                    let total: f64 = b.row(row).iter().map(|w| w * w).sum();
                    assert!((total - 1.0).abs() < 1e-14, "{:?} row {row}: {total}", sys.model);
                }
            }
        }
    }

    #[test]
    fn full_model_layout() {
        let p = DeviceParams { budget: PhotonBudget::Signal(100.0), nu: 0.01, ..fig3b(0.5) };
        let sys = build_full_model(&p).unwrap();
        assert_eq!(sys.system.dim(), 6);
        assert_eq!(sys.system.port_count(), 10);
        let a = sys.system.drift();
        assert_relative_eq!(a[(0, 2)], -0.1, max_relative = 1e-14);
        assert_relative_eq!(a[(2, 0)], 0.1, max_relative = 1e-14);
        assert_relative_eq!(a[(1, 3)], -0.1, max_relative = 1e-14);
        assert_relative_eq!(a[(3, 1)], 0.1, max_relative = 1e-14);
        let bad = DeviceParams { kappa_p_abs: 30.0, ..p };
        assert!(matches!(build_full_model(&bad), Err(Error::InvalidArgument(_))));
        // full model tolerates sigma above one
        assert!(build_full_model(&DeviceParams { sigma: 1.05, ..p }).is_ok());
    }

    #[test]
    fn working_point_values() {
        let p = DeviceParams {
            sigma: 0.5,
            nu: 1e-3,
            kappa_p: 20.0,
            g0: 0.0,
            budget: PhotonBudget::Signal(1e4),
            ..fig3b(0.5)
        };
        let p = DeviceParams { kappa_abs: 0.0, ..p };
        let wp = working_point(&p).unwrap();
        assert_relative_eq!(wp.alpha_p, 250.0, max_relative = 1e-14);
        assert_relative_eq!(wp.alpha_p_in, 5010.0 / (2.0 * 20f64.sqrt()), max_relative = 1e-14);
        assert_eq!(wp.beta, 0.0);
        assert_eq!(wp.detuning_ratio, 0.0);
        assert_eq!(wp.alpha_s_in_im, 0.0);
    }

    #[test]
    fn working_point_residuals_vanish() {
        let p = DeviceParams { n_th: 3.0, kappa_p_abs: 2.0, ..fig3b(0.7) };
        let p = DeviceParams { g0: 1e-3, ..p };
        let wp = working_point(&p).unwrap();
        assert!(wp.alpha_s_in_im < 0.0);
        for r in stationary_residuals(&p, &wp) {
            assert!(r < 1e-12 * wp.alpha_p_in.max(1.0), "residual {r}");
        }
    }

    #[test]
    fn fluctuation_photon_values() {
        assert_relative_eq!(fluctuation_photons(0.9).unwrap(), (5.0 + 5.0 / 19.0) / 2.0, max_relative = 1e-14);
        assert!((fluctuation_photons(0.9).unwrap() - 2.632).abs() < 1e-3);
        assert!(fluctuation_photons(1.0).is_none());
        let p = DeviceParams { sigma: 1.2, budget: PhotonBudget::Signal(100.0), ..fig3b(0.5) };
        let wp = working_point(&p).unwrap();
        assert!(wp.fluct_photons.is_none());
        assert_relative_eq!(wp.alpha_p, 600.0, max_relative = 1e-14);
    }

    #[test]
    fn validity_checks() {
        let p = DeviceParams { g0: 0.0, ..DeviceParams::default() };
        let r = validity_report(&p);
        assert_eq!(r[0].name, "detuning");
        assert!(r[0].passed && r[0].ratio == 0.0);

        // lithium-niobate scale: nu/Omega = 1e-3
        let p = DeviceParams { nu: 1e-4, omega_m: 0.1, ..DeviceParams::default() };
        let r = validity_report(&p);
        assert!(r[2].passed);
        assert_relative_eq!(r[2].ratio, 1e-3, max_relative = 1e-12);

        let p = DeviceParams { sigma: 0.99, budget: PhotonBudget::Signal(10.0), ..DeviceParams::default() };
        let r = validity_report(&p);
        assert!(!r[1].passed);
        assert!((fluctuation_photons(0.99).unwrap() - 25.126).abs() < 1e-3);
    }

    #[test]
    fn bose_factor() {
        assert_relative_eq!(bose_occupancy(1.0), 1.0 / (std::f64::consts::E - 1.0), max_relative = 1e-15);
        assert!((bose_occupancy(1.0) - 0.58198).abs() < 1e-5);
        assert_eq!(bose_occupancy(0.0), 0.0);
    }
}
