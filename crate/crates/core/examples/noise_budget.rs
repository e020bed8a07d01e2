// Imprecision, backaction and added noise at the mechanical frequency, from
// the closed form and from the numeric Langevin model.
//
// cargo run --example noise_budget

use optomech_squeeze::device::{build_ideal_dpa, g0_for_cooperativity, DeviceParams, PhotonBudget};
use optomech_squeeze::metrics::{noise_budget_ideal, noise_budget_lti, NoiseBudget};
use optomech_squeeze::Result;

pub fn run() -> Result<(NoiseBudget, NoiseBudget)> {
    let (nu, gamma_m) = (1e-3, 1e-6);
    let params = DeviceParams {
        gamma_m,
        g0: g0_for_cooperativity(0.1, gamma_m, nu),
        budget: PhotonBudget::Signal(0.8 / (4.0 * nu * nu)),
        ..DeviceParams::default()
    };
    let closed = noise_budget_ideal(&params)?;
    let numeric = noise_budget_lti(&build_ideal_dpa(&params)?, params.omega_m)?;
    for b in [&closed, &numeric] {
        println!(
            "{:<12} s_imp = {:.12}  s_back = {:.12}  s_add = {:.12}",
            b.model_tag.as_str(),
            b.s_imp,
            b.s_back,
            b.s_add
        );
    }
    Ok((closed, numeric))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run().map(|_| ())
}
