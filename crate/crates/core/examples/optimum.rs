// Optimal pump parameter and photon number, and the photon saving over an
// unpumped readout.
//
// cargo run --example optimum

use optomech_squeeze::design::{minimize_added_noise, optimal_point_for, BudgetFn, MinimizeOptions, OptimumReport};
use optomech_squeeze::device::{g0_for_cooperativity, DeviceParams};
use optomech_squeeze::Result;

pub fn run() -> Result<OptimumReport> {
    let (c_thr, omega_m) = (0.1, 0.1);
    let report = optimal_point_for(c_thr, omega_m, 5)?;
    println!("sigma*      = {:.9}", report.sigma_star);
    println!("n*/n_thr    = {:.9}", report.n_star);
    println!("suppression = {:.6}", report.suppression);

    let params = DeviceParams {
        omega_m,
        g0: g0_for_cooperativity(c_thr, 1e-3, 1e-3),
        ..DeviceParams::default()
    };
    println!("\n{:>10} {:>12} {:>12} {:>10}", "n/n_thr", "sigma_opt", "numeric", "s_add");
    for &(n, s) in &report.sigma_opt_curve {
        let m = minimize_added_noise(&params, n, BudgetFn::Ideal, MinimizeOptions::default())?;
        println!("{n:>10.5} {s:>12.8} {:>12.8} {:>10.6}", m.sigma, m.s_add);
    }
    Ok(report)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run().map(|_| ())
}
