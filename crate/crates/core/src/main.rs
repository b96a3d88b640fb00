use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qswitch::cli::{render, run_sweep, run_verify, OutputFormat, SweepConfig};
use qswitch::oracle::Suite;
use qswitch::Error;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "qswitch", version, about = "Holevo capacity of two depolarizing channels combined by the quantum SWITCH")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity table over (d, q, p).
    Sweep {
        /// Target dimensions, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        dims: Vec<usize>,
        /// Depolarizing parameters in [0, 1]; q = 0 is completely depolarizing.
        #[arg(long = "q", value_delimiter = ',', default_value = "0")]
        q: Vec<f64>,
        /// Control weights on |0>; 0.5 is |+>.
        #[arg(long = "p", value_delimiter = ',', default_value = "0.5")]
        p: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: SweepFormat,
    },
    /// Compare analytic results against the brute-force oracle.
    Verify {
        /// One of: analytic-vs-brute, spectrum-vs-eigensolver, chi-vs-optimizer, marginals, cptp.
        suite: String,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
}

fn sweep(cfg: SweepConfig, out: Option<PathBuf>) -> ExitCode {
    let rows = match run_sweep(&cfg) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let body = render(&rows, cfg.format);
    match out {
        Some(path) => {
            if let Err(e) = fs::write(&path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::SUCCESS
}

fn verify(suite: &str, tolerance: f64, out: Option<PathBuf>, format: ReportFormat) -> ExitCode {
    let report = match run_verify(suite, tolerance) {
        Ok(r) => r,
        Err(e @ Error::UnknownSuite(_)) => {
            let names: Vec<&str> = Suite::ALL.iter().map(Suite::name).collect();
            eprintln!("error: {e}\nusage: qswitch verify <SUITE> [--tolerance TOL]\nsuites: {}", names.join(", "));
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VERIFY_FAILED);
        }
    };
    match format {
        ReportFormat::Text => println!("{report}"),
        ReportFormat::Json => println!("{}", report.to_json()),
    }
    if let Some(path) = out {
        if let Err(e) = fs::write(&path, report.to_json() + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Sweep {
            dims,
            q,
            p,
            trials,
            seed,
            out,
            format,
        } => {
            let cfg = SweepConfig {
                dims,
                q_values: q,
                p_values: p,
                optimizer_trials: trials,
                seed,
                format: match format {
                    SweepFormat::Csv => OutputFormat::Csv,
                    SweepFormat::Json => OutputFormat::Json,
                },
            };
            sweep(cfg, out)
        }
        Command::Verify {
            suite,
            tolerance,
            out,
            format,
        } => verify(&suite, tolerance, out, format),
    }
}
