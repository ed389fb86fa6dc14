use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use radialmp::commands::{self, Command};
use radialmp::{exit, init_threads, CliError, Flags};
use radialmp_core::potentials::End;

#[derive(Parser)]
#[command(name = "radialmp", version, about = "Radial weighted elliptic problems: exponents, embeddings and mountain-pass solutions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Problem configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output: a `.csv` file for solve/probe, otherwise a directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON report path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config dimension.
    #[arg(long = "N", global = true)]
    n: Option<u32>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EndArg {
    Zero,
    Infinity,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the hypotheses on A, V, K and f.
    Check,
    /// Exponent calculus and admissible intervals.
    Exponents,
    /// Compute a nonnegative mountain-pass solution.
    Solve {
        /// Also solve on the doubled grid and report the energy change.
        #[arg(long)]
        refine: bool,
    },
    /// Lower-bound estimates of the embedding suprema.
    Probe {
        #[arg(long, value_enum)]
        end: Option<EndArg>,
        #[arg(long)]
        q: Option<f64>,
        /// `lo:hi:n` log-spaced radii.
        #[arg(long)]
        radii: Option<String>,
    },
    /// Pointwise decay bounds over random function batteries.
    VerifyEstimates {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.05)]
        slack: f64,
    },
    /// Exponent table for the built-in examples.
    ReproduceExamples,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::OK,
                _ => exit::USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    init_threads();
    let flags = Flags {
        config: cli.config,
        out: cli.out,
        report: cli.report,
        seed: cli.seed,
        n: cli.n,
        quiet: cli.quiet,
    };
    let cmd = match cli.command {
        Cmd::Check => Command::Check,
        Cmd::Exponents => Command::Exponents,
        Cmd::Solve { refine } => Command::Solve { refine },
        Cmd::Probe { end, q, radii } => Command::Probe {
            end: end.map(|e| match e {
                EndArg::Zero => End::Zero,
                EndArg::Infinity => End::Infinity,
            }),
            q,
            radii,
        },
        Cmd::VerifyEstimates { trials, radius, slack } => Command::VerifyEstimates { trials, radius, slack },
        Cmd::ReproduceExamples => Command::ReproduceExamples,
    };
    match commands::run(&cmd, &flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("radialmp: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `radialmp --help` for usage");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
