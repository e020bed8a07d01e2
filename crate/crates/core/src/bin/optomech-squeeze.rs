use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optomech_squeeze::io::{self, Command, RunConfig, RunManifest};
use optomech_squeeze::Result;

#[derive(Parser)]
#[command(version, about = "Noise budgets for optomechanical readout with an intracavity parametric amplifier")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config and the environment.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Significant digits in CSV output.
    #[arg(long)]
    precision: Option<usize>,
    /// Worker threads for grid evaluation; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Sub {
    /// Phase-output spectra, pumped and unpumped, plus a zoom around the mechanical peaks.
    Spectrum(RunArgs),
    /// Added noise over photon number and pump parameter.
    NoiseMap(RunArgs),
    /// Minimal added noise versus threshold cooperativity.
    Sweep(RunArgs),
    /// Optimal pump parameter, photon number and suppression factor.
    Optimize(RunArgs),
    /// Drift-matrix eigenvalues over a pump range and the bisected threshold.
    Stability(RunArgs),
    /// Linearization validity checks and the classical working point.
    Validate(RunArgs),
    /// Re-run a manifest and check that every output hashes identically.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn out_dir(flag: Option<PathBuf>, configured: &str) -> PathBuf {
    flag.or_else(|| std::env::var_os(io::OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(configured))
}

fn with_threads<T>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| optomech_squeeze::Error::InvalidArgument(format!("--threads: {e}")))?
            .install(f),
        None => f(),
    }
}

fn main_inner(cli: Cli) -> Result<PathBuf> {
    let (command, args) = match cli.command {
        Sub::Spectrum(a) => (Command::Spectrum, a),
        Sub::NoiseMap(a) => (Command::NoiseMap, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::Optimize(a) => (Command::Optimize, a),
        Sub::Stability(a) => (Command::Stability, a),
        Sub::Validate(a) => (Command::Validate, a),
        Sub::Replay { manifest, out, threads } => {
            let m = RunManifest::load(&manifest)?;
            let dir = out_dir(out, &m.config.output.directory);
            with_threads(threads, || io::replay(&m, &dir))?;
            return Ok(io::commands::manifest_path(&m.config, &dir));
        }
    };
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(p) = args.precision {
        cfg.output.precision = p;
    }
    let dir = out_dir(args.out, &cfg.output.directory);
    with_threads(args.threads, || io::execute(command, &cfg, &dir))?;
    Ok(io::commands::manifest_path(&cfg, &dir))
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
