//! JSON run configuration: parsing with field-path errors and resolution
//! into [`DeviceParams`] and concrete grids.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::design::{balanced_signal_photons, MinimizeOptions};
use crate::device::{bose_occupancy, g0_for_cooperativity, DeviceParams, ModelKind, PhotonBudget};
use crate::error::{Error, Result};
use crate::grid::{linspace, logspace, SpectrumGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub sigma: f64,
    pub omega_m: f64,
    pub gamma_m: f64,
    pub nu: f64,
    /// Omitted means `κ_p → ∞`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_p: Option<f64>,
    #[serde(default)]
    pub kappa_abs: f64,
    #[serde(default)]
    pub kappa_p_abs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_thr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_total: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_signal: Option<f64>,
    /// Choose `n̄_s` so that imprecision equals backaction at `σ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_signal_balanced: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_th: Option<f64>,
    /// `k_B T / ħΩ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_ratio: Option<f64>,
}

/// Vertical normalization of output spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Shot noise at 1/2.
    #[default]
    ShotHalf,
    /// Shot noise at 1.
    ShotUnity,
}

impl Normalization {
    pub fn shot_floor(&self) -> f64 {
        match self {
            Normalization::ShotHalf => 0.5,
            Normalization::ShotUnity => 1.0,
        }
    }

    /// Factor applied to spectra computed with a floor of 1/2.
    pub fn scale(&self) -> f64 {
        self.shot_floor() / 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl GridSpec {
    pub fn values(&self, field: &str) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(Error::config(format!("{field}.points"), "grid must be non-empty"));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::config(field, "grid bounds must be finite"));
        }
        if self.points > 1 && !(self.stop > self.start) {
            return Err(Error::config(format!("{field}.stop"), "must exceed start"));
        }
        match self.scale {
            Scale::Linear => Ok(linspace(self.start, self.stop, self.points)),
            Scale::Log => logspace(self.start, self.stop, self.points)
                .map_err(|_| Error::config(format!("{field}.start"), "log grid bounds must be > 0")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaGrid {
    pub half_span: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoomGrid {
    pub points: usize,
    /// Half width of each window around `±Ω`, in units of `Γ`.
    pub half_width_gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_model")]
    pub model: ModelKind,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zoom: Option<ZoomGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_range: Option<GridSpec>,
    /// Total photons `n̄/n̄_p^(thr)` for the cooperativity sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_ratio: Option<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_bisection_tol")]
    pub bisection_tol: f64,
}

fn default_model() -> ModelKind {
    ModelKind::Ideal
}

fn default_epsilon() -> f64 {
    1e-6
}

fn default_bisection_tol() -> f64 {
    1e-12
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            model: default_model(),
            normalization: Normalization::default(),
            omega: None,
            zoom: None,
            n_grid: None,
            sigma_grid: None,
            c_grid: None,
            sigma_range: None,
            n_ratio: None,
            epsilon: default_epsilon(),
            bisection_tol: default_bisection_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default)]
    pub prefix: String,
    #[serde(default = "default_precision")]
    pub precision: usize,
}

fn default_directory() -> String {
    ".".into()
}

fn default_precision() -> usize {
    12
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: default_directory(),
            prefix: String::new(),
            precision: default_precision(),
        }
    }
}

fn exactly_one(block: &str, fields: &[(&str, bool)]) -> Result<()> {
    let set: Vec<&str> = fields.iter().filter(|f| f.1).map(|f| f.0).collect();
    if set.len() == 1 {
        return Ok(());
    }
    let names: Vec<&str> = fields.iter().map(|f| f.0).collect();
    let path = match set.first() {
        Some(first) => format!("{block}.{first}"),
        None => format!("{block}.{}", names[0]),
    };
    Err(Error::config(
        path,
        format!("exactly one of {} must be set, found {}", names.join(" | "), set.len()),
    ))
}

impl DeviceConfig {
    /// Resolve into validated device parameters.
    pub fn resolve(&self) -> Result<DeviceParams> {
        exactly_one("device", &[("g0", self.g0.is_some()), ("c_thr", self.c_thr.is_some())])?;
        exactly_one(
            "device",
            &[
                ("n_total", self.n_total.is_some()),
                ("n_signal", self.n_signal.is_some()),
                ("n_signal_balanced", self.n_signal_balanced.is_some()),
            ],
        )?;
        exactly_one(
            "device",
            &[("n_th", self.n_th.is_some()), ("temperature_ratio", self.temperature_ratio.is_some())],
        )?;
        if self.n_signal_balanced == Some(false) {
            return Err(Error::config("device.n_signal_balanced", "must be true when present"));
        }
        if let Some(c) = self.c_thr {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::config("device.c_thr", format!("must be > 0, got {c}")));
            }
        }
        if let Some(t) = self.temperature_ratio {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::config("device.temperature_ratio", format!("must be >= 0, got {t}")));
            }
        }
        if let Some(kp) = self.kappa_p {
            if !(kp > 0.0) || !kp.is_finite() {
                return Err(Error::config("device.kappa_p", format!("must be > 0 and finite, got {kp}")));
            }
        }
        let g0 = match (self.g0, self.c_thr) {
            (Some(g), _) => g,
            (None, Some(c)) => g0_for_cooperativity(c, self.gamma_m, self.nu),
            (None, None) => unreachable!(),
        };
        let n_th = match (self.n_th, self.temperature_ratio) {
            (Some(n), _) => n,
            (None, Some(t)) => bose_occupancy(t),
            (None, None) => unreachable!(),
        };
        let mut params = DeviceParams {
            sigma: self.sigma,
            omega_m: self.omega_m,
            gamma_m: self.gamma_m,
            kappa_p: self.kappa_p.unwrap_or(f64::INFINITY),
            kappa_abs: self.kappa_abs,
            kappa_p_abs: self.kappa_p_abs,
            nu: self.nu,
            g0,
            budget: PhotonBudget::Signal(0.0),
            n_th,
        };
        params.budget = match (self.n_total, self.n_signal) {
            (Some(n), _) => PhotonBudget::Total(n),
            (None, Some(n)) => PhotonBudget::Signal(n),
            (None, None) => {
                params.validate().map_err(prefix_device)?;
                if !(g0 > 0.0) {
                    return Err(Error::config("device.n_signal_balanced", "needs g0 > 0"));
                }
                PhotonBudget::Signal(balanced_signal_photons(&params))
            }
        };
        params.validate().map_err(prefix_device)?;
        Ok(params)
    }
}

fn prefix_device(e: Error) -> Error {
    match e {
        Error::Config { path, message } => Error::config(format!("device.{path}"), message),
        other => other,
    }
}

impl RunConfig {
    /// Parse a JSON document; errors carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path.is_empty() { ".".into() } else { path }, e.inner().to_string())
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Semantic checks that do not depend on the command.
    pub fn check(&self) -> Result<()> {
        self.device.resolve()?;
        let a = &self.analysis;
        if !(a.epsilon > 0.0 && a.epsilon < 1.0) {
            return Err(Error::config("analysis.epsilon", "must lie in (0, 1)"));
        }
        if !(a.bisection_tol > 0.0) {
            return Err(Error::config("analysis.bisection_tol", "must be > 0"));
        }
        if let Some(n) = a.n_ratio {
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::config("analysis.n_ratio", format!("must be > 0, got {n}")));
            }
        }
        if let Some(g) = a.omega {
            if g.points == 0 {
                return Err(Error::config("analysis.omega.points", "grid must be non-empty"));
            }
            if !(g.half_span > 0.0) || !g.half_span.is_finite() {
                return Err(Error::config("analysis.omega.half_span", "must be > 0"));
            }
        }
        if let Some(z) = a.zoom {
            if !(z.half_width_gamma > 0.0) || !z.half_width_gamma.is_finite() {
                return Err(Error::config("analysis.zoom.half_width_gamma", "must be > 0"));
            }
        }
        for (name, g) in [
            ("n_grid", a.n_grid),
            ("sigma_grid", a.sigma_grid),
            ("c_grid", a.c_grid),
            ("sigma_range", a.sigma_range),
        ] {
            if let Some(g) = g {
                g.values(&format!("analysis.{name}"))?;
            }
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(Error::config("output.precision", "must be between 1 and 17"));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<DeviceParams> {
        self.device.resolve()
    }

    pub fn spectrum_grid(&self) -> SpectrumGrid {
        let mut g = SpectrumGrid::default();
        if let Some(o) = self.analysis.omega {
            g.half_span = o.half_span;
            g.points = o.points;
        }
        if let Some(z) = self.analysis.zoom {
            g.zoom_points = z.points;
            g.zoom_half_width_gamma = z.half_width_gamma;
        }
        g
    }

    /// A required analysis grid, or a config error naming it.
    pub fn grid(&self, name: &str) -> Result<Vec<f64>> {
        let a = &self.analysis;
        let spec = match name {
            "n_grid" => a.n_grid,
            "sigma_grid" => a.sigma_grid,
            "c_grid" => a.c_grid,
            "sigma_range" => a.sigma_range,
            _ => None,
        };
        let path = format!("analysis.{name}");
        spec.ok_or_else(|| Error::config(&path, "required by this command"))?
            .values(&path)
    }

    pub fn minimize_options(&self) -> MinimizeOptions {
        MinimizeOptions {
            epsilon: self.analysis.epsilon,
            ..MinimizeOptions::default()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"device": {"sigma": 0.6, "omega_m": 0.2, "gamma_m": 1e-3, "nu": 1e-3,
        "c_thr": 0.1, "n_signal": 2e5, "n_th": 0}}"#;

    #[test]
    fn minimal_config_resolves() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        let p = cfg.params().unwrap();
        assert!((p.threshold_cooperativity() - 0.1).abs() < 1e-12);
        assert_eq!(p.kappa_p, f64::INFINITY);
        assert_eq!(cfg.output.precision, 12);
        assert_eq!(cfg.analysis.model, ModelKind::Ideal);
    }

    #[test]
    fn unknown_key_names_path() {
        let text = MINIMAL.replace("\"n_th\"", "\"n_thermal\"");
        match RunConfig::from_json(&text) {
            Err(Error::Config { path, message }) => {
                assert_eq!(path, "device.n_thermal");
                assert!(message.contains("unknown field"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_type_names_path() {
        let text = MINIMAL.replace("\"sigma\": 0.6", "\"sigma\": \"high\"");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config { path, .. }) if path == "device.sigma"));
    }

    #[test]
    fn budget_exclusivity() {
        let text = MINIMAL.replace("\"n_signal\": 2e5", "\"n_signal\": 2e5, \"n_total\": 1e6");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config { path, .. }) if path == "device.n_total"));
        let text = MINIMAL.replace("\"n_th\": 0", "\"n_th\": 0, \"temperature_ratio\": 1");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config { path, .. }) if path == "device.n_th"));
        let text = MINIMAL.replace(", \"n_th\": 0", "");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config { path, .. }) if path == "device.n_th"));
    }

    #[test]
    fn invalid_rate_is_prefixed() {
        let text = MINIMAL.replace("\"gamma_m\": 1e-3", "\"gamma_m\": -1");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config { path, .. }) if path == "device.gamma_m"));
    }

    #[test]
    fn balanced_budget_and_temperature() {
        let text = MINIMAL
            .replace("\"n_signal\": 2e5", "\"n_signal_balanced\": true")
            .replace("\"n_th\": 0", "\"temperature_ratio\": 1");
        let p = RunConfig::from_json(&text).unwrap().params().unwrap();
        // s_imp = s_back at σ = 0.6, Ω = 0.2, C = 0.1 needs n̄_s = 0.8 n̄_p^(thr)
        assert!((p.n_signal() / p.pump_threshold() - 0.8).abs() < 1e-12);
        assert!((p.n_th - 1.0 / (std::f64::consts::E - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn empty_grid_rejected() {
        let text = MINIMAL.replace(
            "}}",
            r#"}, "analysis": {"n_grid": {"start": 0.1, "stop": 2, "points": 0}}}"#,
        );
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config { path, .. }) if path == "analysis.n_grid.points"));
    }

    #[test]
    fn json_round_trip() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}
