//! Frequency-domain engine for linear quantum Langevin systems.
//!
//! A system is `dv/dt = A v + B ξ` with white, mutually uncorrelated noise
//! ports `ξ_k` of symmetrized density `D_k`. Outputs are taps of the form
//! `out = Λ·ξ − C·v` (input-output boundary condition). In the frequency
//! domain (`d/dt → −iω`) the state response is `T(ω) = (−iω − A)⁻¹ B` and the
//! output response `O(ω) = Λ − C T(ω)`, so every symmetrized spectrum is a sum
//! of `|O_k|² D_k` over ports.
//!
//! All quantities are in cavity-linewidth units (`κ_s = 1`).

use nalgebra::{linalg::Schur, DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// A white noise input with its symmetrized spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePort {
    pub label: String,
    pub density: f64,
}

impl NoisePort {
    pub fn new(label: impl Into<String>, density: f64) -> Self {
        NoisePort {
            label: label.into(),
            density,
        }
    }

    /// Vacuum quadrature port, density 1/2.
    pub fn vacuum(label: impl Into<String>) -> Self {
        Self::new(label, 0.5)
    }
}

/// Output tap `out = feedthrough·ξ − state_row·v`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTap {
    pub label: String,
    pub state_row: DVector<f64>,
    pub feedthrough: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearLangevinSystem {
    state_labels: Vec<String>,
    drift: DMatrix<f64>,
    input_coupling: DMatrix<f64>,
    ports: Vec<NoisePort>,
    taps: Vec<OutputTap>,
}

impl LinearLangevinSystem {
    /// Assemble a system, checking that all shapes agree and densities are non-negative.
    pub fn new(
        state_labels: Vec<String>,
        drift: DMatrix<f64>,
        input_coupling: DMatrix<f64>,
        ports: Vec<NoisePort>,
        taps: Vec<OutputTap>,
    ) -> Result<Self> {
        let n = state_labels.len();
        if drift.nrows() != n || drift.ncols() != n {
            return Err(Error::invalid(format!(
                "drift must be {n}x{n}, got {}x{}",
                drift.nrows(),
                drift.ncols()
            )));
        }
        if input_coupling.nrows() != n || input_coupling.ncols() != ports.len() {
            return Err(Error::invalid(format!(
                "input coupling must be {n}x{}, got {}x{}",
                ports.len(),
                input_coupling.nrows(),
                input_coupling.ncols()
            )));
        }
        for p in &ports {
            if !(p.density >= 0.0) || !p.density.is_finite() {
                return Err(Error::invalid(format!(
                    "port `{}` has invalid density {}",
                    p.label, p.density
                )));
            }
        }
        for t in &taps {
            if t.state_row.len() != n || t.feedthrough.len() != ports.len() {
                return Err(Error::invalid(format!(
                    "tap `{}` has row lengths ({}, {}), expected ({n}, {})",
                    t.label,
                    t.state_row.len(),
                    t.feedthrough.len(),
                    ports.len()
                )));
            }
        }
        if drift.iter().chain(input_coupling.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("drift and input coupling must be finite"));
        }
        Ok(LinearLangevinSystem {
            state_labels,
            drift,
            input_coupling,
            ports,
            taps,
        })
    }

    pub fn dim(&self) -> usize {
        self.state_labels.len()
    }

    pub fn port_count(&self) -> usize {
        self.ports.len()
    }

    pub fn state_labels(&self) -> &[String] {
        &self.state_labels
    }

    pub fn drift(&self) -> &DMatrix<f64> {
        &self.drift
    }

    pub fn input_coupling(&self) -> &DMatrix<f64> {
        &self.input_coupling
    }

    pub fn ports(&self) -> &[NoisePort] {
        &self.ports
    }

    pub fn taps(&self) -> &[OutputTap] {
        &self.taps
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.state_labels.iter().position(|l| l == label)
    }

    pub fn port_index(&self, label: &str) -> Option<usize> {
        self.ports.iter().position(|p| p.label == label)
    }

    pub fn tap_index(&self, label: &str) -> Option<usize> {
        self.taps.iter().position(|t| t.label == label)
    }

    /// Drop ports that neither drive a state nor feed through to any tap.
    pub fn prune_silent_ports(&self) -> LinearLangevinSystem {
        let keep: Vec<usize> = (0..self.ports.len())
            .filter(|&k| {
                self.input_coupling.column(k).iter().any(|&v| v != 0.0)
                    || self.taps.iter().any(|t| t.feedthrough[k] != 0.0)
            })
            .collect();
        let b = DMatrix::from_fn(self.dim(), keep.len(), |i, j| {
            self.input_coupling[(i, keep[j])]
        });
        let taps = self
            .taps
            .iter()
            .map(|t| OutputTap {
                label: t.label.clone(),
                state_row: t.state_row.clone(),
                feedthrough: DVector::from_iterator(keep.len(), keep.iter().map(|&k| t.feedthrough[k])),
            })
            .collect();
        LinearLangevinSystem {
            state_labels: self.state_labels.clone(),
            drift: self.drift.clone(),
            input_coupling: b,
            ports: keep.iter().map(|&k| self.ports[k].clone()).collect(),
            taps,
        }
    }
}

/// State and output responses to unit port amplitudes at one frequency.
#[derive(Debug, Clone)]
pub struct TransferResponse {
    pub omega: f64,
    /// `T(ω)`, states × ports.
    pub states: DMatrix<Complex64>,
    /// `O(ω)`, taps × ports.
    pub outputs: DMatrix<Complex64>,
}

impl TransferResponse {
    /// Max-norm of `(−iω − A)·T − B`.
    pub fn residual(&self, system: &LinearLangevinSystem) -> f64 {
        let m = resolvent_matrix(system, self.omega);
        let b = system.input_coupling.map(|v| Complex64::new(v, 0.0));
        (m * &self.states - b)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn resolvent_matrix(system: &LinearLangevinSystem, omega: f64) -> DMatrix<Complex64> {
    let n = system.dim();
    DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { Complex64::new(0.0, -omega) } else { Complex64::new(0.0, 0.0) };
        diag - system.drift[(i, j)]
    })
}

/// Solve for `T(ω)` and `O(ω)` by dense LU.
pub fn frequency_response(system: &LinearLangevinSystem, omega: f64) -> Result<TransferResponse> {
    if !omega.is_finite() {
        return Err(Error::invalid(format!("frequency must be finite, got {omega}")));
    }
    let m = resolvent_matrix(system, omega);
    let b = system.input_coupling.map(|v| Complex64::new(v, 0.0));
    let states = m
        .lu()
        .solve(&b)
        .filter(|t| t.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or(Error::ResonantDegenerate { omega })?;

    let n_taps = system.taps.len();
    let n_ports = system.port_count();
    let mut outputs = DMatrix::from_element(n_taps, n_ports, Complex64::new(0.0, 0.0));
    for (r, tap) in system.taps.iter().enumerate() {
        for k in 0..n_ports {
            let mut acc = Complex64::new(tap.feedthrough[k], 0.0);
            for i in 0..system.dim() {
                acc -= states[(i, k)] * tap.state_row[i];
            }
            outputs[(r, k)] = acc;
        }
    }
    Ok(TransferResponse {
        omega,
        states,
        outputs,
    })
}

/// Evaluate `f` at every grid frequency in parallel, assembling results in grid order.
pub fn map_grid<T, F>(system: &LinearLangevinSystem, grid: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&TransferResponse) -> T + Sync,
{
    grid.par_iter()
        .map(|&w| frequency_response(system, w).map(|r| f(&r)))
        .collect()
}

/// Units carried by a [`SpectrumSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SpectrumUnits {
    /// Optical quadrature spectrum, shot floor 1/2.
    #[serde(rename = "quadrature")]
    Quadrature,
    /// Position spectrum in `x_ZPF²/κ_s`.
    #[serde(rename = "x_zpf2_per_kappa")]
    PositionZpf,
    /// Ratio to the standard quantum limit.
    #[serde(rename = "sql")]
    Sql,
    /// Product of a position and a force spectrum in zero-point units (`ħ²`).
    #[serde(rename = "zpf_product")]
    ZeroPointProduct,
}

impl SpectrumUnits {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumUnits::Quadrature => "quadrature",
            SpectrumUnits::PositionZpf => "x_zpf2_per_kappa",
            SpectrumUnits::Sql => "sql",
            SpectrumUnits::ZeroPointProduct => "zpf_product",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    omega: Vec<f64>,
    values: Vec<f64>,
    units: SpectrumUnits,
}

impl SpectrumSeries {
    pub fn new(omega: Vec<f64>, values: Vec<f64>, units: SpectrumUnits) -> Result<Self> {
        check_grid(&omega)?;
        if values.len() != omega.len() {
            return Err(Error::invalid(format!(
                "{} values for {} grid points",
                values.len(),
                omega.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::invalid(format!("spectrum value {v} is not finite and non-negative")));
        }
        Ok(SpectrumSeries {
            omega,
            values,
            units,
        })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn units(&self) -> SpectrumUnits {
        self.units
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn value_at(&self, w: f64) -> Option<f64> {
        let i = self.omega.partition_point(|&x| x < w);
        if i == self.omega.len() {
            return None;
        }
        if self.omega[i] == w {
            return Some(self.values[i]);
        }
        if i == 0 {
            return None;
        }
        let (x0, x1) = (self.omega[i - 1], self.omega[i]);
        let t = (w - x0) / (x1 - x0);
        Some(self.values[i - 1] * (1.0 - t) + self.values[i] * t)
    }
}

pub(crate) fn check_grid(omega: &[f64]) -> Result<()> {
    if omega.is_empty() {
        return Err(Error::invalid("frequency grid is empty"));
    }
    if omega.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("frequency grid contains non-finite values"));
    }
    if omega.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::invalid("frequency grid must be strictly increasing"));
    }
    Ok(())
}

fn port_weighted_power(row: impl Iterator<Item = Complex64>, ports: &[NoisePort]) -> f64 {
    row.zip(ports).map(|(z, p)| z.norm_sqr() * p.density).sum()
}

fn require_stable(system: &LinearLangevinSystem) -> Result<()> {
    let report = stability_eigenvalues(system)?;
    if !report.stable {
        return Err(Error::Unstable {
            max_real: report.max_real,
        });
    }
    Ok(())
}

/// Symmetrized spectrum of output tap `tap_index`, shot floor 1/2.
pub fn output_spectrum(
    system: &LinearLangevinSystem,
    tap_index: usize,
    grid: &[f64],
) -> Result<SpectrumSeries> {
    if tap_index >= system.taps.len() {
        return Err(Error::invalid(format!(
            "tap index {tap_index} out of range ({} taps)",
            system.taps.len()
        )));
    }
    check_grid(grid)?;
    require_stable(system)?;
    let values = map_grid(system, grid, |r| {
        port_weighted_power(r.outputs.row(tap_index).iter().copied(), &system.ports)
    })?;
    SpectrumSeries::new(grid.to_vec(), values, SpectrumUnits::Quadrature)
}

/// Symmetrized spectrum of a state variable. For a mechanical position the
/// units are `x_ZPF²/κ_s`.
pub fn state_spectrum(
    system: &LinearLangevinSystem,
    state_index: usize,
    grid: &[f64],
    units: SpectrumUnits,
) -> Result<SpectrumSeries> {
    if state_index >= system.dim() {
        return Err(Error::invalid(format!("state index {state_index} out of range")));
    }
    check_grid(grid)?;
    require_stable(system)?;
    let values = map_grid(system, grid, |r| {
        port_weighted_power(r.states.row(state_index).iter().copied(), &system.ports)
    })?;
    SpectrumSeries::new(grid.to_vec(), values, units)
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    /// Sorted by descending real part, then descending imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub stable: bool,
    pub max_real: f64,
    /// Smallest intensity decay rate, `−2·max Re λ`.
    pub min_decay_rate: f64,
}

impl StabilityReport {
    pub fn verdict(&self) -> &'static str {
        if self.stable {
            "stable"
        } else {
            "unstable"
        }
    }
}

/// Eigenvalues of the drift matrix and the stability verdict.
pub fn stability_eigenvalues(system: &LinearLangevinSystem) -> Result<StabilityReport> {
    let dim = system.dim();
    if dim == 0 {
        return Err(Error::invalid("empty system"));
    }
    let schur = Schur::try_new(system.drift.clone(), f64::EPSILON, 10_000)
        .ok_or(Error::EigenNonConvergence { dim })?;
    let mut eigenvalues: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenNonConvergence { dim });
    }
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let max_real = eigenvalues[0].re;
    Ok(StabilityReport {
        stable: max_real < 0.0,
        max_real,
        min_decay_rate: -2.0 * max_real,
        eigenvalues,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaEstimate {
    /// `∫ (S − floor) dω / 2π`.
    pub area: f64,
    /// False when the series does not settle onto the floor at the grid edges.
    pub converged: bool,
}

/// Composite trapezoid estimate of `∫ (S(ω) − floor) dω / 2π`.
///
/// Convergence requires both end values to be within `1e-6` of `floor`,
/// measured relative to the largest excursion of the series from the floor.
pub fn spectrum_area(series: &SpectrumSeries, floor: f64) -> AreaEstimate {
    let w = &series.omega;
    let s = &series.values;
    let integral: f64 = w
        .windows(2)
        .zip(s.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * ((y[0] - floor) + (y[1] - floor)))
        .sum();
    let peak = s.iter().map(|v| (v - floor).abs()).fold(0.0, f64::max);
    let edge = (s[0] - floor).abs().max((s[s.len() - 1] - floor).abs());
    AreaEstimate {
        area: integral / (2.0 * std::f64::consts::PI),
        converged: s.len() > 1 && edge <= 1e-6 * peak.max(f64::MIN_POSITIVE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn single_pole() -> LinearLangevinSystem {
        LinearLangevinSystem::new(
            vec!["v".into()],
            DMatrix::from_element(1, 1, -0.5),
            DMatrix::from_element(1, 1, 1.0),
            vec![NoisePort::vacuum("in")],
            vec![OutputTap {
                label: "out".into(),
                state_row: DVector::from_element(1, 1.0),
                feedthrough: DVector::from_element(1, 1.0),
            }],
        )
        .unwrap()
    }

    #[test]
    fn single_pole_static_response() {
        let r = frequency_response(&single_pole(), 0.0).unwrap();
        assert_relative_eq!(r.states[(0, 0)].re, 2.0, epsilon = 1e-15);
        assert_eq!(r.states[(0, 0)].im, 0.0);
        // out = in − v, a lossless single-sided cavity on resonance reflects with −1
        assert_relative_eq!(r.outputs[(0, 0)].re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn lossless_cavity_reflects_shot_noise() {
        let grid: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.25).collect();
        let s = output_spectrum(&single_pole(), 0, &grid).unwrap();
        for v in s.values() {
            assert_relative_eq!(*v, 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn decoupled_feedthrough_is_shot_floor() {
        let sys = LinearLangevinSystem::new(
            vec!["v".into()],
            DMatrix::from_element(1, 1, -1.0),
            DMatrix::from_element(1, 1, 0.0),
            vec![NoisePort::vacuum("in")],
            vec![OutputTap {
                label: "out".into(),
                state_row: DVector::from_element(1, 0.0),
                feedthrough: DVector::from_element(1, 1.0),
            }],
        )
        .unwrap();
        let s = output_spectrum(&sys, 0, &[-3.0, 0.0, 7.0]).unwrap();
        assert_eq!(s.values(), &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn shape_violations_rejected() {
        let err = LinearLangevinSystem::new(
            vec!["a".into(), "b".into()],
            DMatrix::zeros(2, 2),
            DMatrix::zeros(1, 1),
            vec![NoisePort::vacuum("in")],
            vec![],
        );
        assert!(err.is_err());
        let neg = LinearLangevinSystem::new(
            vec!["a".into()],
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
            vec![NoisePort::new("in", -0.1)],
            vec![],
        );
        assert!(neg.is_err());
    }

    #[test]
    fn unstable_system_refused() {
        let sys = LinearLangevinSystem::new(
            vec!["v".into()],
            DMatrix::from_element(1, 1, 0.1),
            DMatrix::from_element(1, 1, 1.0),
            vec![NoisePort::vacuum("in")],
            vec![OutputTap {
                label: "out".into(),
                state_row: DVector::from_element(1, 1.0),
                feedthrough: DVector::from_element(1, 1.0),
            }],
        )
        .unwrap();
        match output_spectrum(&sys, 0, &[0.0]) {
            Err(Error::Unstable { max_real }) => assert_relative_eq!(max_real, 0.1, epsilon = 1e-14),
            other => panic!("expected unstable, got {other:?}"),
        }
    }

    #[test]
    fn empty_grid_and_bad_tap_rejected() {
        assert!(matches!(output_spectrum(&single_pole(), 0, &[]), Err(Error::InvalidArgument(_))));
        assert!(matches!(output_spectrum(&single_pole(), 3, &[0.0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn singular_resolvent_reported() {
        // Marginal oscillator: eigenvalues ±i, singular at ω = 1.
        let drift = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let sys = LinearLangevinSystem::new(
            vec!["x".into(), "p".into()],
            drift,
            DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
            vec![NoisePort::vacuum("f")],
            vec![],
        )
        .unwrap();
        match frequency_response(&sys, 1.0) {
            Err(Error::ResonantDegenerate { omega }) => assert_eq!(omega, 1.0),
            other => panic!("expected resonant-degenerate, got {other:?}"),
        }
    }

    #[test]
    fn rectangle_area() {
        let w = 3.0;
        let grid: Vec<f64> = (0..=600).map(|i| -w + i as f64 * 0.01).collect();
        let s = SpectrumSeries::new(grid.clone(), vec![0.7; grid.len()], SpectrumUnits::Quadrature).unwrap();
        let a = spectrum_area(&s, 0.0);
        assert_relative_eq!(a.area, 0.7 * w / std::f64::consts::PI, max_relative = 1e-12);
        assert!(!a.converged);
        let a = spectrum_area(&s, 0.7);
        assert!(a.area.abs() < 1e-15);
    }

    #[test]
    fn series_validation() {
        assert!(SpectrumSeries::new(vec![0.0, 0.0], vec![1.0, 1.0], SpectrumUnits::Sql).is_err());
        assert!(SpectrumSeries::new(vec![0.0, 1.0], vec![1.0, -1.0], SpectrumUnits::Sql).is_err());
        let s = SpectrumSeries::new(vec![0.0, 1.0], vec![1.0, 3.0], SpectrumUnits::Sql).unwrap();
        assert_eq!(s.value_at(0.5), Some(2.0));
        assert_eq!(s.value_at(1.5), None);
    }
}
