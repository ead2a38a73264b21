use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use itelab::{run, Command, ExperimentConfig};

/// Interior transmission eigenvalues, far fields and asymptotic checks for
/// radially symmetric media.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides the `output` field of the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for parameter sweeps.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Relative ODE tolerance; overrides `tolerances.ode`.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ITELAB_LOG", "warn")).init();
    let cli = Cli::parse();
    let mut config = match ExperimentConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(tol) = cli.tol {
        config.tolerances.ode = tol;
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let out = cli
        .out
        .or_else(|| config.output.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    match run(cli.command, &config, &out) {
        Ok(outcome) => {
            for path in &outcome.artifacts {
                println!("{}", path.display());
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("validation failed; see validate.json");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
