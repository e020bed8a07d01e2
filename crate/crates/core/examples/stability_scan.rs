// Parametric-oscillation threshold with and without a dynamical pump mode.
// The pump back-conversion pushes the threshold above `σ = 1`.
//
// cargo run --example stability_scan

use optomech_squeeze::device::{DeviceParams, ModelKind, PhotonBudget};
use optomech_squeeze::stability::{bisect_threshold, stability_at};
use optomech_squeeze::Result;

pub fn run() -> Result<Vec<(f64, f64, f64)>> {
    let nu = 0.01;
    let mut out = Vec::new();
    let ideal = bisect_threshold(ModelKind::Ideal, &DeviceParams::default(), 0.5, 1.5, 1e-12)?;
    println!("ideal model: sigma_thr = {:.12}", ideal.unwrap_or(f64::NAN));
    println!("\n{:>10} {:>6} {:>14} {:>14}", "nu*sqrt(n)", "k_p", "sigma_thr", "Gamma_mech");
    for coupling in [0.1, 0.3] {
        for kappa_p in [2.0, 5.0, 20.0] {
            let p = DeviceParams {
                nu,
                kappa_p,
                budget: PhotonBudget::Signal((coupling / nu) * (coupling / nu)),
                ..DeviceParams::default()
            };
            let t = bisect_threshold(ModelKind::Full, &p, 0.5, 2.0, 1e-12)?.unwrap_or(f64::NAN);
            let row = stability_at(ModelKind::Full, &p.with_sigma(1.0))?;
            println!("{coupling:>10.2} {kappa_p:>6.1} {t:>14.10} {:>14.3e}", row.mech_decay_rate);
            out.push((coupling, kappa_p, t));
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run().map(|_| ())
}
