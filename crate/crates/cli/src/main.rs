use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use ergolab_cli::cache::{cache_file, default_cache_dir, SieveCache};
use ergolab_cli::values::parse_count;
use ergolab_cli::{list_experiments, run_experiment, CliError, CliResult, ExperimentConfig, EXIT_TOLERANCE};

#[derive(Parser)]
#[command(name = "ergolab", version, about = "Desk-scale experiments on multiplicative ergodic averages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV report.
    Run {
        experiment: String,
        /// Parameters as key=value.
        params: Vec<String>,
        /// File of key=value lines; command-line parameters override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check the built-in tolerances and exit with status 1 on a violation.
        #[arg(long)]
        accept: bool,
    },
    /// List experiments with their keys, defaults and statements.
    List,
    /// Build a factor sieve and store it in the cache.
    Sieve {
        #[arg(long)]
        limit: String,
    },
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::List => {
            print!("{}", list_experiments());
            Ok(0)
        }
        Command::Sieve { limit } => {
            let limit = parse_count(&limit)?;
            let start = Instant::now();
            let mut cache = SieveCache::from_env();
            let sieve = cache.get(limit)?;
            for n in &cache.notes {
                eprintln!("note: {n}");
            }
            let secs = start.elapsed().as_secs_f64();
            match default_cache_dir() {
                Some(d) => println!("sieve to {} ready in {secs:.2} s: {}", sieve.limit(), cache_file(&d, sieve.limit()).display()),
                None => println!("sieve to {} ready in {secs:.2} s (no cache directory)", sieve.limit()),
            }
            Ok(0)
        }
        Command::Run { experiment, params, config, out, accept } => {
            let file_text = match &config {
                Some(path) => Some(
                    std::fs::read_to_string(path)
                        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?,
                ),
                None => None,
            };
            let cfg = ExperimentConfig::from_parts(&experiment, &params, file_text.as_deref())?;
            let outcome = run_experiment(&cfg)?;
            let csv = outcome.report.to_csv();
            match &out {
                Some(path) => std::fs::write(path, &csv)
                    .map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{csv}"),
            }
            for n in &outcome.notes {
                eprintln!("note: {n}");
            }
            if !accept {
                return Ok(0);
            }
            for c in &outcome.checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                eprintln!("{verdict} {experiment} {} N={}: defect {:.6} (tolerance {})", c.quantity, c.n, c.defect, c.tolerance);
            }
            if outcome.checks.is_empty() {
                eprintln!("no tolerances apply to this configuration");
            }
            Ok(if outcome.all_pass() { 0 } else { EXIT_TOLERANCE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
