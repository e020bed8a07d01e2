// The generic Langevin engine on its own: a damped oscillator driven by a
// thermal bath, whose position spectrum integrates to `2n_th + 1`.
//
// cargo run --example thermal_area

use nalgebra::{DMatrix, DVector};
use optomech_squeeze::grid::{merge, zoom_window, SpectrumGrid};
use optomech_squeeze::lti::{spectrum_area, state_spectrum, LinearLangevinSystem, NoisePort, OutputTap, SpectrumUnits};
use optomech_squeeze::Result;

pub fn run() -> Result<Vec<(f64, f64)>> {
    let (omega_m, gamma_m): (f64, f64) = (0.2, 1e-3);
    let mut out = Vec::new();
    for n_th in [0.0, 0.58198, 10.0] {
        let d = 2.0 * n_th + 1.0;
        let drift = DMatrix::from_row_slice(2, 2, &[-gamma_m / 2.0, omega_m, -omega_m, -gamma_m / 2.0]);
        let b = DMatrix::from_diagonal_element(2, 2, gamma_m.sqrt());
        let sys = LinearLangevinSystem::new(
            vec!["x".into(), "p".into()],
            drift,
            b,
            vec![NoisePort::new("xi_x", d), NoisePort::new("xi_p", d)],
            vec![OutputTap {
                label: "x".into(),
                state_row: DVector::from_vec(vec![1.0, 0.0]),
                feedthrough: DVector::zeros(2),
            }],
        )?;
        // a wide window keeps the Lorentzian tails inside the grid
        let grid = merge([
            SpectrumGrid::default().with_zoom(omega_m, gamma_m),
            zoom_window(omega_m, 4.0, 4001),
            zoom_window(-omega_m, 4.0, 4001),
        ]);
        let s = state_spectrum(&sys, 0, &grid, SpectrumUnits::PositionZpf)?;
        let area = spectrum_area(&s, 0.0).area;
        println!("n_th = {n_th:<8} area = {area:.6}  expected {d:.6}");
        out.push((n_th, area));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run().map(|_| ())
}
