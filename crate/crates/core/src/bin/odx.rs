//! `odx`: verify, analyze, optimize, and sample one-query oracle identification.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 usage or input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use odx::linalg::StateVector;
use odx::optimize::DEFAULT_SPREAD_TOL;
use odx::oracle::{canonical_one_bit_family, OracleFamily};
use odx::protocol::probe_state;
use odx::report::{self, Perturbations, ReportDocument};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "odx",
    version,
    about = "Minimum-error one-query identification of Boolean oracles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct FamilyArgs {
    /// Family file: one `n=.. m=.. table=..` line per function. Defaults to
    /// the four one-bit functions.
    #[arg(long)]
    family: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct ProbeArgs {
    /// Probe file: one `re im` amplitude per line. Defaults to the
    /// closed-form optimal probe.
    #[arg(long)]
    probe: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full check battery on the closed-form protocol.
    Verify {
        /// Add this to the first measurement rotation angle.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        perturb_theta1: f64,
        /// Add this to the |00> probe amplitude, then renormalize.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        perturb_probe: f64,
    },
    /// Gram matrix of the post-oracle states and its spectrum.
    Gram {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        probe: ProbeArgs,
    },
    /// Square-root measurement, success probabilities, optimality certificate.
    Srm {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        probe: ProbeArgs,
    },
    /// Numerical search for the best probe.
    Optimize {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SPREAD_TOL)]
        tol: f64,
    },
    /// Shot-level Monte Carlo of the protocol.
    Sample {
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Best classical single-query strategy.
    Classical {
        #[command(flatten)]
        family: FamilyArgs,
    },
}

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_family(args: &FamilyArgs) -> Result<OracleFamily, String> {
    match &args.family {
        None => Ok(canonical_one_bit_family()),
        Some(p) => OracleFamily::parse(&read(p)?).map_err(|e| format!("{}: {e}", p.display())),
    }
}

fn load_probe(args: &ProbeArgs) -> Result<StateVector, String> {
    match &args.probe {
        None => Ok(probe_state()),
        Some(p) => {
            let (s, warning) =
                report::parse_probe(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?;
            if let Some(w) = warning {
                eprintln!("warning: {}: {w}", p.display());
            }
            Ok(s)
        }
    }
}

fn run(cmd: &Command) -> Result<ReportDocument, String> {
    let doc = match cmd {
        Command::Verify {
            perturb_theta1,
            perturb_probe,
        } => report::verify(Perturbations {
            theta1: *perturb_theta1,
            probe: *perturb_probe,
        }),
        Command::Gram { family, probe } => {
            report::gram_report(&load_family(family)?, &load_probe(probe)?)
        }
        Command::Srm { family, probe } => {
            report::srm_report(&load_family(family)?, &load_probe(probe)?)
        }
        Command::Optimize {
            family,
            restarts,
            seed,
            tol,
        } => report::optimize_report(&load_family(family)?, *restarts, *seed, *tol),
        Command::Sample { shots, seed } => report::sample_report(*shots, *seed),
        Command::Classical { family } => report::classical_report(&load_family(family)?),
    };
    doc.map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let doc = match run(&cli.command) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let rendered = match cli.format {
        Format::Json => doc.to_json() + "\n",
        Format::Csv => doc.to_csv(),
        Format::Text => doc.to_text(),
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = fs::write(p, rendered) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{rendered}"),
    }
    if let Some(c) = doc.first_failure() {
        eprintln!(
            "check failed: {} (measured {}, expected {}, tol {})",
            c.name, c.measured, c.expected, c.tolerance
        );
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
