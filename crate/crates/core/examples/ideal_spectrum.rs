// Phase-quadrature output of the parametric amplifier, with and without the
// pump, at the same number of signal photons.
//
// cargo run --example ideal_spectrum

use optomech_squeeze::device::{build_ideal_dpa, DeviceParams, PhotonBudget};
use optomech_squeeze::grid::linspace;
use optomech_squeeze::lti::output_spectrum;
use optomech_squeeze::Result;

pub fn run() -> Result<Vec<(f64, f64, f64)>> {
    let pumped = DeviceParams::default();
    let unpumped = DeviceParams {
        sigma: 0.0,
        budget: PhotonBudget::Signal(pumped.n_signal()),
        ..pumped
    };
    let grid = linspace(-1.0, 1.0, 9);
    let a = build_ideal_dpa(&pumped)?;
    let b = build_ideal_dpa(&unpumped)?;
    let sa = output_spectrum(&a.system, a.layout.phase_tap, &grid)?;
    let sb = output_spectrum(&b.system, b.layout.phase_tap, &grid)?;

    println!("{:>8} {:>12} {:>12} {:>9}", "omega", "pumped", "unpumped", "dB");
    let mut rows = Vec::new();
    for ((&w, &p), &u) in grid.iter().zip(sa.values()).zip(sb.values()) {
        println!("{:>8.3} {:>12.6} {:>12.6} {:>9.2}", w, p, u, 10.0 * (p / 0.5).log10());
        rows.push((w, p, u));
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run().map(|_| ())
}
