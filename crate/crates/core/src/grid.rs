//! Frequency and parameter grids.

use crate::error::{Error, Result};

/// `points` evenly spaced values over `[start, stop]`, inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (points - 1) as f64;
            (0..points)
                .map(|i| if i == points - 1 { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

/// `points` logarithmically spaced values over `[start, stop]`, both > 0.
pub fn logspace(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > 0.0) {
        return Err(Error::invalid("logspace bounds must be positive"));
    }
    Ok(linspace(start.ln(), stop.ln(), points)
        .into_iter()
        .enumerate()
        .map(|(i, l)| match i {
            0 => start,
            _ if i == points - 1 => stop,
            _ => l.exp(),
        })
        .collect())
}

/// Points around `center` with geometric spacing in the offset, spanning
/// `±half_width`. Odd `points`, centre included.
pub fn zoom_window(center: f64, half_width: f64, points: usize) -> Vec<f64> {
    let side = points.saturating_sub(1) / 2;
    if side == 0 {
        return vec![center];
    }
    let inner = half_width * 2e-5;
    let offsets = logspace(inner, half_width, side).unwrap_or_default();
    let mut out: Vec<f64> = offsets.iter().rev().map(|d| center - d).collect();
    out.push(center);
    out.extend(offsets.iter().map(|d| center + d));
    out
}

/// Sort and drop exact duplicates.
pub fn merge(grids: impl IntoIterator<Item = Vec<f64>>) -> Vec<f64> {
    let mut all: Vec<f64> = grids.into_iter().flatten().collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

/// Linear frequency grid settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumGrid {
    pub half_span: f64,
    pub points: usize,
    pub zoom_points: usize,
    /// Half width of each zoom window in units of Γ.
    pub zoom_half_width_gamma: f64,
}

impl Default for SpectrumGrid {
    fn default() -> Self {
        SpectrumGrid {
            half_span: 5.0,
            points: 4001,
            zoom_points: 2001,
            zoom_half_width_gamma: 50.0,
        }
    }
}

impl SpectrumGrid {
    pub fn base(&self) -> Vec<f64> {
        linspace(-self.half_span, self.half_span, self.points)
    }

    /// Zoom windows around `+Ω` and `−Ω`, merged and sorted.
    pub fn zoom(&self, omega_m: f64, gamma_m: f64) -> Vec<f64> {
        let hw = self.zoom_half_width_gamma * gamma_m;
        let plus = zoom_window(omega_m, hw, self.zoom_points);
        let minus = plus.iter().rev().map(|w| -w).collect();
        merge([minus, plus])
    }

    /// Base grid merged with both zoom windows.
    pub fn with_zoom(&self, omega_m: f64, gamma_m: f64) -> Vec<f64> {
        if self.zoom_points == 0 {
            return self.base();
        }
        merge([self.base(), self.zoom(omega_m, gamma_m)])
    }
}
