// Classical working point and the checks behind the linearized model.
//
// cargo run --example validity

use optomech_squeeze::device::{validity_report, working_point, DeviceParams, ValidityCheck};
use optomech_squeeze::Result;

pub fn run() -> Result<Vec<ValidityCheck>> {
    let params = DeviceParams::default();
    let wp = working_point(&params)?;
    println!("alpha_p = {:.4}  alpha_s = {:.4}  beta = {:.4}", wp.alpha_p, wp.alpha_s, wp.beta);
    println!("pump drive {:.4}, signal drive {:.4}", wp.alpha_p_in, wp.alpha_s_in());
    let checks = validity_report(&params);
    for c in &checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        println!("{mark} {:<14} {:>12.4e} < {:<6} {}", c.name, c.ratio, c.threshold, c.note);
    }
    Ok(checks)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run().map(|_| ())
}
