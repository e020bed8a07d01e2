// Drive the command layer from a JSON config held in memory, the same path
// the `optomech-squeeze` binary takes.
//
// cargo run --example run_config

use optomech_squeeze::io::{run, Command, RunConfig};
use optomech_squeeze::Result;

const CONFIG: &str = r#"{
  "device": {
    "sigma": 0.6, "omega_m": 0.1, "gamma_m": 1e-5, "nu": 1e-3,
    "c_thr": 0.1, "n_total": 250000, "n_th": 0
  },
  "analysis": {
    "c_grid": { "start": 0.01, "stop": 0.13, "points": 4, "scale": "log" }
  },
  "output": { "precision": 8 }
}"#;

pub fn run_example() -> Result<Vec<String>> {
    let cfg = RunConfig::from_json(CONFIG)?;
    let mut names = Vec::new();
    for command in [Command::Optimize, Command::Sweep, Command::Validate] {
        for a in run(command, &cfg)? {
            println!("--- {} ({})\n{}", a.name, command.as_str(), String::from_utf8_lossy(&a.bytes));
            names.push(a.name);
        }
    }
    Ok(names)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
