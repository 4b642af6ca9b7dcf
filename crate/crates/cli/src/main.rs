use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polthomas_cli::{run, write_error_report, CliConfig, Command, Overrides};

/// Polarization optics as Lorentz-group numerics.
#[derive(Debug, Parser)]
#[command(name = "polthomas", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Trace input states through the elements; writes report.json and trajectory.csv.
    Simulate(Common),
    /// Find the absorber that closes the sequence.
    Closure(Common),
    /// Compare the path-ordered Wilson loop with the exact boost product.
    Wilson(Common),
    /// Thomas rotation, solid angle and Pancharatnam phases of a closed sequence.
    Phase(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (TOML, or JSON if it ends in .json).
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Wilson-loop steps per segment.
    #[arg(long)]
    steps: Option<usize>,
    /// Trajectory samples per element.
    #[arg(long)]
    samples: Option<usize>,
    /// Closure tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Append the absorber that closes the sequence.
    #[arg(long)]
    close: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, c) = match cli.command {
        Cmd::Simulate(c) => (Command::Simulate, c),
        Cmd::Closure(c) => (Command::Closure, c),
        Cmd::Wilson(c) => (Command::Wilson, c),
        Cmd::Phase(c) => (Command::Phase, c),
    };
    let config = CliConfig {
        command,
        scenario_path: c.scenario,
        output_dir: c.out,
        overrides: Overrides {
            wilson_steps: c.steps,
            trace_samples: c.samples,
            tolerance: c.tol,
            close: c.close,
        },
    };
    match run(&config) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            let value = write_error_report(&config, &e);
            eprintln!("{}", serde_json::to_string(&value).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
