//! `locc-recover`: majorization checks, recovery synthesis and scans on
//! Schmidt spectra stored as JSON files.

mod commands;
mod error;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use locc_recovery::{Execution, Tolerance};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "locc-recover", version, about = "Entanglement conversion and partial recovery on Schmidt spectra")]
struct Cli {
    /// Absolute tolerance on prefix sums.
    #[arg(long, global = true, default_value_t = 1e-12, value_parser = parse_tol)]
    tol: f64,
    /// Report entropies in bits instead of nats (display only).
    #[arg(long, global = true)]
    bits: bool,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Pair {
    /// State file of the source state.
    psi: PathBuf,
    /// State file of the target state.
    phi: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide convertibility and classify the equality structure.
    Check {
        #[arg(required_unless_present = "cert")]
        psi: Option<PathBuf>,
        #[arg(required_unless_present = "cert")]
        phi: Option<PathBuf>,
        /// Re-verify a certificate record instead.
        #[arg(long, conflicts_with_all = ["psi", "phi"])]
        cert: Option<PathBuf>,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
    },
    /// Synthesize a recovery pair and emit a certificate.
    Recover {
        #[command(flatten)]
        pair: Pair,
        /// Fraction of the maximal transfer to apply, in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        epsilon_fraction: f64,
        /// Run the unguaranteed random search when the smallest
        /// coefficients agree.
        #[arg(long)]
        heuristic: bool,
        /// Seed for random fallbacks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random candidates per search.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Certificate path; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record the current UTC time in the certificate.
        #[arg(long)]
        timestamp: bool,
    },
    /// Largest transfer for the two-level auxiliary state (p, 1 - p).
    Epsmax {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        p: f64,
    },
    /// Best recovery found per auxiliary dimension.
    Scan {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        /// Grid step for the two-level scan.
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random draws per dimension above 2.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Cap on two-level grid points.
        #[arg(long, default_value_t = 10_000_000)]
        max_points: usize,
        /// Output path; printed to stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate a comparable pair with a prescribed equality pattern.
    Gen {
        #[arg(long)]
        n: usize,
        /// `strict` or `delta:<m1,m2,...>` (1-based prefix lengths).
        #[arg(long, default_value = "strict")]
        pattern: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Minimum prefix gap outside the pattern.
        #[arg(long, default_value_t = locc_recovery::genpairs::DEFAULT_MARGIN)]
        margin: f64,
        /// Writes `<prefix>psi.json` and `<prefix>phi.json`.
        #[arg(long)]
        out_prefix: String,
    },
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Tolerance::new(v).map(|t| t.eq_tol()).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        tol: Tolerance::new(cli.tol).expect("validated by parser"),
        bits: cli.bits,
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
    };
    let result = match cli.command {
        Command::Check { psi, phi, cert, json } => match cert {
            Some(path) => commands::check_cert(&ctx, &path, json),
            None => commands::check(&ctx, &psi.expect("required"), &phi.expect("required"), json),
        },
        Command::Recover {
            pair,
            epsilon_fraction,
            heuristic,
            seed,
            samples,
            out,
            timestamp,
        } => commands::recover(
            &ctx,
            &pair.psi,
            &pair.phi,
            commands::RecoverArgs {
                epsilon_fraction,
                heuristic,
                seed,
                samples,
                out,
                timestamp,
            },
        ),
        Command::Epsmax { pair, p } => commands::epsmax(&ctx, &pair.psi, &pair.phi, p),
        Command::Scan {
            pair,
            kmax,
            resolution,
            seed,
            samples,
            max_points,
            csv,
        } => {
            let grid = locc_recovery::oracle::GridSpec {
                resolution,
                max_points,
                seed,
                samples,
            };
            commands::scan(&ctx, &pair.psi, &pair.phi, kmax, &grid, csv.as_deref())
        }
        Command::Gen {
            n,
            pattern,
            seed,
            margin,
            out_prefix,
        } => commands::gen(n, &pattern, seed, margin, &out_prefix),
    };
    match result {
        Ok(status) => status.into(),
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    e.status().into()
}
