// Distance between the six-variable model and the adiabatic model as the
// pump decay rate grows; it falls off as `κ_s/κ_p`.
//
// cargo run --example full_model_convergence

use optomech_squeeze::device::{build_adiabatic_model, build_full_model, DeviceParams, PhotonBudget};
use optomech_squeeze::grid::linspace;
use optomech_squeeze::lti::output_spectrum;
use optomech_squeeze::Result;

fn sup_distance(kappa_p: f64, grid: &[f64]) -> Result<f64> {
    let p = DeviceParams {
        nu: 0.01,
        g0: 0.0,
        kappa_p,
        budget: PhotonBudget::Signal(100.0),
        ..DeviceParams::default()
    };
    let full = build_full_model(&p)?;
    let adiabatic = build_adiabatic_model(&p)?;
    let a = output_spectrum(&full.system, full.layout.phase_tap, grid)?;
    let b = output_spectrum(&adiabatic.system, adiabatic.layout.phase_tap, grid)?;
    Ok(a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

pub fn run() -> Result<Vec<(f64, f64)>> {
    let grid = linspace(-5.0, 5.0, 401);
    let mut out = Vec::new();
    println!("{:>8} {:>14}", "k_p", "sup |dS_YY|");
    for kappa_p in [25.0, 50.0, 100.0, 200.0, 400.0] {
        let d = sup_distance(kappa_p, &grid)?;
        println!("{kappa_p:>8.0} {d:>14.6e}");
        out.push((kappa_p, d));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run().map(|_| ())
}
