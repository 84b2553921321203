use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phased_mimo_cli::config::{load_raw, ExperimentConfig};
use phased_mimo_cli::{run_experiment, verify_hash, Experiment, HarnessError};

#[derive(Parser)]
#[command(name = "phased-mimo", version, about = "Phased-MIMO radar experiments with CSV output")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON experiment config; defaults apply to missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo pulses per SINR point.
    #[arg(long)]
    runs: Option<usize>,
    /// Angle grid step in degrees.
    #[arg(long = "grid-deg")]
    grid_deg: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// C, D, R and overall patterns for the phased array, MIMO and phased-MIMO radars.
    Beampattern(RunArgs),
    /// Output SINR versus SNR.
    SinrCurve(RunArgs),
    /// Adaptive receive patterns from trained MVDR weights.
    MvdrPattern(RunArgs),
    /// Complementary-K pattern symmetry check.
    VerifyProp1(RunArgs),
    /// Peak sidelobe ordering against the phased array.
    VerifyProp2(RunArgs),
    /// Sinc-product sidelobe bound curves.
    HkCurves(RunArgs),
    /// Recompute and check the scenario hash embedded in CSV files.
    VerifyHash { files: Vec<PathBuf> },
    /// Print the resolved config as JSON.
    PrintConfig(RunArgs),
}

fn resolve(experiment: Option<Experiment>, args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &args.config {
        Some(p) => load_raw(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(e) = experiment {
        cfg.experiment = e;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.runs {
        cfg.runs = r;
    }
    if let Some(g) = args.grid_deg {
        cfg.grid_deg = Some(g);
    }
    if let Some(o) = &args.out {
        cfg.output_path = o.clone();
    }
    cfg.resolve()
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let (experiment, args) = match cli.command {
        Command::VerifyHash { files } => {
            for f in &files {
                let hash = verify_hash(f)?;
                println!("ok {} {}", hash, f.display());
            }
            return Ok(());
        }
        Command::PrintConfig(args) => {
            let cfg = resolve(None, &args)?;
            println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
            return Ok(());
        }
        Command::Beampattern(a) => (Experiment::Beampattern, a),
        Command::SinrCurve(a) => (Experiment::SinrCurve, a),
        Command::MvdrPattern(a) => (Experiment::MvdrPattern, a),
        Command::VerifyProp1(a) => (Experiment::VerifyProp1, a),
        Command::VerifyProp2(a) => (Experiment::VerifyProp2, a),
        Command::HkCurves(a) => (Experiment::HkCurves, a),
    };
    let cfg = resolve(Some(experiment), &args)?;
    let summary = run_experiment(&cfg)?;
    for line in &summary.report {
        println!("{line}");
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
