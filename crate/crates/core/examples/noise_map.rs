// Added noise over total photon number and pump parameter, with the SQL
// valley and the optimal-pump ridge compared against their closed forms.
//
// cargo run --example noise_map

use optomech_squeeze::design::{sweep_noise_map, NoiseMap};
use optomech_squeeze::device::{g0_for_cooperativity, DeviceParams};
use optomech_squeeze::grid::linspace;
use optomech_squeeze::Result;

pub fn run() -> Result<NoiseMap> {
    let params = DeviceParams {
        omega_m: 0.1,
        g0: g0_for_cooperativity(0.1, 1e-3, 1e-3),
        ..DeviceParams::default()
    };
    let map = sweep_noise_map(&params, &linspace(0.02, 2.0, 100), &linspace(0.0, 0.98, 50))?;
    let masked = map.cells.iter().filter(|c| c.s_add.is_none()).count();
    println!("{} cells, {masked} masked", map.cells.len());
    println!("\nSQL valley (sigma -> n/n_thr)");
    for p in map.sql_contour.iter().step_by(7) {
        println!("  {:>6.3} analytic {:>8.4} grid {:>8.4}", p.abscissa, p.analytic, p.grid.unwrap_or(f64::NAN));
    }
    println!("\noptimal pump ridge (n/n_thr -> sigma)");
    for p in map.sigma_opt_locus.iter().step_by(8) {
        println!("  {:>6.3} analytic {:>8.4} grid {:>8.4}", p.abscissa, p.analytic, p.grid.unwrap_or(f64::NAN));
    }
    Ok(map)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run().map(|_| ())
}
