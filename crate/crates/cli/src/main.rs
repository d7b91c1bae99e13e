//! `galmon`: classify sparse-system supports, decompose families, compute
//! Fano degrees, sample Frobenius splitting types, run numerical monodromy,
//! and analyze permutation groups — all with stable JSON output.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure (partial
//! results are still printed). Big integers are always decimal strings in
//! the JSON; identical inputs and seeds give byte-identical output.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::{CliError, RunReport};

#[derive(Parser)]
#[command(
    name = "galmon",
    version,
    about = "Galois/monodromy analysis of polynomial-system families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for every randomized step; echoed in the report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for loop tracking (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a support system (mixed volume, lattice index, verdicts).
    Classify {
        /// Support-system JSON: {"n":2,"supports":[[[0,0],[2,0],..],..]}.
        #[arg(long)]
        support: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Recursively decompose a support system and bound its Galois group.
    Decompose {
        #[arg(long)]
        support: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Feasibility and degree of a Fano problem (r, n, d_1 <= d_2 <= ..).
    Fano {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        /// Repeat for several degrees: --d 2 --d 2 --d 3.
        #[arg(long, required = true)]
        d: Vec<u32>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sample Frobenius splitting types of an integer polynomial.
    Frobenius {
        /// Polynomial such as "x^6-503x^5-544x^4-69x^3-152x^2-49x-763".
        #[arg(long)]
        poly: String,
        /// Number of admissible primes to process.
        #[arg(long)]
        count: u64,
        /// First prime candidate (default 2).
        #[arg(long, default_value_t = 2)]
        start: u64,
        /// Reference class distribution JSON; default is the symmetric
        /// group of matching degree when that is tabulated.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Populate a fiber and compute monodromy permutations and group data.
    Monodromy {
        #[arg(long)]
        support: PathBuf,
        /// Number of monodromy loops to attempt.
        #[arg(long, default_value_t = 50)]
        loops: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Analyze a set of permutations given as JSON image arrays.
    AnalyzeGroup {
        /// JSON file: [[1,0,3,2],[2,3,0,1],..] (0-indexed images).
        #[arg(long)]
        perms: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Classify { support, common } => report::classify(&support, &common),
        Command::Decompose { support, common } => report::decompose(&support, &common),
        Command::Fano { r, n, d, common } => report::fano(r, n, d, &common),
        Command::Frobenius {
            poly,
            count,
            start,
            reference,
            common,
        } => report::frobenius(&poly, count, start, reference.as_deref(), &common),
        Command::Monodromy {
            support,
            loops,
            common,
        } => report::monodromy(&support, loops, &common),
        Command::AnalyzeGroup { perms, common } => report::analyze_group(&perms, &common),
    };
    match outcome {
        Ok(report) => match report.emit() {
            Ok(code) => code,
            Err(e) => fail(e),
        },
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

impl RunReport {
    fn emit(self) -> Result<ExitCode, CliError> {
        let json = serde_json::to_string_pretty(&self.body).expect("report serializes");
        match &self.out {
            Some(path) => std::fs::write(path, format!("{json}\n"))
                .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?,
            None => println!("{json}"),
        }
        Ok(ExitCode::from(self.exit_code))
    }
}
