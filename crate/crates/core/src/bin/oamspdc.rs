use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use oamspdc::config::ExperimentConfig;
use oamspdc::experiments::{self, Report};
use oamspdc::{Error, Result};

#[derive(Parser)]
#[command(name = "oamspdc", version, about = "Asymmetric-vortex SPDC experiments from a single TOML config")]
struct Cli {
    /// TOML config; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `output.directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `tomo.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the numerical kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pump OAM spectra and far-field images per (m, shift).
    PumpSpectrum,
    /// Joint spiral spectra and the conditional idler spectrum.
    SpiralSpectrum,
    /// Schmidt-number sweep and the analytic Gaussian-pump value.
    Schmidt,
    /// Bell-state tomography versus pump asymmetry.
    Tomography,
    /// Select the b convention against the K anchor.
    CalibrateB,
    /// Check the config and print its hash.
    Validate,
}

fn run(cli: Cli) -> Result<Report> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    }
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.output.directory = out;
    }
    if let Some(seed) = cli.seed {
        cfg.tomo.seed = seed;
    }
    match cli.command {
        Command::PumpSpectrum => experiments::cmd_pump_spectrum(&cfg),
        Command::SpiralSpectrum => experiments::cmd_spiral_spectrum(&cfg),
        Command::Schmidt => experiments::cmd_schmidt(&cfg),
        Command::Tomography => experiments::cmd_tomography(&cfg),
        Command::CalibrateB => experiments::cmd_calibrate_b(&cfg).map(|c| c.report),
        Command::Validate => experiments::validate(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = run(cli);
    match &result {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(experiments::exit_code(&result) as u8)
}
