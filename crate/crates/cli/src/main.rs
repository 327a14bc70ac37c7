use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tbdkit_cli::{json, run, ExperimentConfig, Outcome, UsageError};

#[derive(Parser, Debug)]
#[command(name = "tbdkit", version, about = "Two-body Dirac experiments")]
struct Cli {
    /// JSON config with header "schema": "tbdkit-config/1".
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for `<command>.json` and `<command>.csv`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compatibility identity on random band-limited fields
    Compat,
    /// Free-current divergence for free and constant-coupling solutions
    Claim1,
    /// Conservation of the completed current over a regulator sweep
    Conserve,
    /// Norm-kernel eigenvalue scan
    Kernel {
        /// Exit 1 when the scan finds a negative eigenvalue.
        #[arg(long)]
        certify: bool,
    },
    /// Yukawa violation radius against the scan boundary
    Radius,
    /// Two-state indefinite-metric model
    Toy,
    /// Kernel under relative and total-momentum phases
    Gauge,
    /// Every check with small defaults
    Selfcheck,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Compat => "compat",
            Command::Claim1 => "claim1",
            Command::Conserve => "conserve",
            Command::Kernel { .. } => "kernel",
            Command::Radius => "radius",
            Command::Toy => "toy",
            Command::Gauge => "gauge",
            Command::Selfcheck => "selfcheck",
        }
    }
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(raw) = std::env::var("TBDKIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError(format!("TBDKIT_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| UsageError(e.to_string()))
}

fn write_artifacts(dir: &Path, cfg: &ExperimentConfig, outcome: &Outcome, text: &str) -> Result<(), UsageError> {
    let io = |e: std::io::Error| UsageError(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let names = cfg.outputs.clone().unwrap_or_default();
    let json_name = names.json.unwrap_or_else(|| format!("{}.json", outcome.command));
    std::fs::write(dir.join(json_name), text).map_err(io)?;
    if let Some(csv) = &outcome.csv {
        let csv_name = names.csv.unwrap_or_else(|| format!("{}.csv", outcome.command));
        std::fs::write(dir.join(csv_name), csv).map_err(io)?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Outcome, UsageError> {
    configure_threads()?;
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::empty(),
    };
    if let Command::Kernel { certify: true } = cli.command {
        cfg.certify = Some(true);
    }
    let outcome = run(cli.command.name(), &cfg)?;
    let text = json::to_string(&outcome.document());
    match &cli.out {
        Some(dir) => {
            write_artifacts(dir, &cfg, &outcome, &text)?;
            if !cli.quiet {
                let status = if outcome.ok { "ok" } else { "FAILED" };
                println!("{}: {status} ({})", outcome.command, dir.display());
            }
        }
        None if !cli.quiet => print!("{text}"),
        None => {}
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) if outcome.ok => ExitCode::SUCCESS,
        Ok(outcome) => {
            eprintln!("tbdkit {}: a check failed", outcome.command);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("tbdkit: {e}");
            ExitCode::from(2)
        }
    }
}
