// Minimal added noise versus threshold cooperativity at `n̄ = n̄_p^(thr)`:
// lossless squeezing, squeezing with absorption and pump up-conversion, and
// no squeezing.
//
// cargo run --example lossy_sweep

use optomech_squeeze::design::{sweep_cooperativity, CooperativityRow, MinimizeOptions};
use optomech_squeeze::device::DeviceParams;
use optomech_squeeze::grid::logspace;
use optomech_squeeze::Result;

pub fn run() -> Result<Vec<CooperativityRow>> {
    let template = DeviceParams {
        omega_m: 0.1,
        gamma_m: 1e-5,
        kappa_abs: 0.01,
        kappa_p: 20.0,
        ..DeviceParams::default()
    };
    let rows = sweep_cooperativity(&template, &logspace(1e-3, 0.13, 6)?, 1.0, MinimizeOptions::default())?;
    println!("{:>10} {:>10} {:>10} {:>10} {:>8} {:>8}", "C_thr", "ideal", "lossy", "plain", "s_id", "s_loss");
    for r in &rows {
        println!(
            "{:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>8.4} {:>8.4}",
            r.c_thr, r.s_add_ideal, r.s_add_lossy, r.s_add_nosqueeze, r.sigma_min_ideal, r.sigma_min_lossy
        );
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run().map(|_| ())
}
