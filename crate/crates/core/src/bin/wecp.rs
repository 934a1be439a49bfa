use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wecp::cli::{
    cmd_oracle, cmd_recurse, cmd_report, cmd_sweep, coefficients_from_args, oracle_exit_code,
    CliError, Format, Quantity, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "wecp",
    version,
    about = "W-state entanglement concentration with parity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Coefficients {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Omit to infer beta = sqrt(1 - alpha² - gamma²); given, all three are rescaled.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Branch table, concurrences and efficiencies of one round, as JSON.
    Report {
        #[command(flatten)]
        coefficients: Coefficients,
    },
    /// Scan a quantity over alpha at fixed gamma.
    Sweep {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        alpha_min: f64,
        #[arg(long)]
        alpha_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, value_enum)]
        quantity: Quantity,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Cumulative success probability per recursion depth, as JSON.
    Recurse {
        #[command(flatten)]
        coefficients: Coefficients,
        #[arg(long)]
        depth: usize,
    },
    /// Compare closed forms with brute-force enumeration over a grid.
    Oracle {
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes")
}

/// Writes to stdout; a closed pipe downstream is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Report { coefficients: c } => {
            let w = coefficients_from_args(c.alpha, c.beta, c.gamma)?;
            let report = cmd_report(&w)?;
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            emit(&format!("{}\n", to_json(&report)))?;
        }
        Command::Sweep {
            gamma,
            alpha_min,
            alpha_max,
            steps,
            quantity,
            depth,
            out,
            format,
        } => {
            let cfg = SweepConfig {
                gamma,
                alpha_min,
                alpha_max,
                steps,
                quantity,
                depth,
            };
            let text = cmd_sweep(&cfg, out.as_deref(), format)?;
            if out.is_none() {
                emit(&text)?;
            }
        }
        Command::Recurse {
            coefficients: c,
            depth,
        } => {
            let w = coefficients_from_args(c.alpha, c.beta, c.gamma)?;
            emit(&format!("{}\n", to_json(&cmd_recurse(&w, depth)?)))?;
        }
        Command::Oracle { steps } => {
            let summary = cmd_oracle(steps)?;
            emit(&format!(
                "{}\nmax deviation: {:e}\n",
                to_json(&summary),
                summary.max_deviation()
            ))?;
            return Ok(oracle_exit_code(&summary));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
