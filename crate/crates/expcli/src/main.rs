use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinbath_cli::config::{Experiment, ExperimentConfig, DEFAULT_ORACLE_TOLERANCE};
use spinbath_cli::{oracle, run_experiment, Result};

#[derive(Parser)]
#[command(name = "spinbath", version, about = "Central-qubit dephasing in an XX spin bath")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Treat degenerate ground levels as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Cross-check every fast path against dense brute force.
    Oracle {
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ORACLE_TOLERANCE)]
        tolerance: f64,
    },
    /// List the built-in experiments and their columns.
    ListExperiments,
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(spinbath_cli::CliError::Validation("--workers must be positive".into()));
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match cli.command {
        Command::Run { config, out, strict } => {
            let mut resolved = ExperimentConfig::load(&config)?.resolve()?;
            resolved.strict |= strict;
            if out.is_some() {
                resolved.output_dir = out;
            }
            let dir = resolved.output_dir.clone().unwrap_or_else(|| PathBuf::from("results"));
            let table = run_experiment(&resolved)?;
            let (csv, meta) = table.write(&dir)?;
            for note in &table.diagnostics.notes {
                log::info!("{note}");
            }
            println!("{} rows -> {} ({})", table.rows.len(), csv.display(), meta.display());
        }
        Command::Oracle { max_n, out, tolerance } => {
            let table = oracle::oracle_table(max_n)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("results"));
            let (csv, _) = table.write(&dir)?;
            for (check, dev) in &table.diagnostics.oracle_deviations {
                println!("{check:<16} {dev:.3e}");
            }
            println!("-> {}", csv.display());
            oracle::verify(&table, tolerance)?;
        }
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<7} {}", e.name(), e.summary());
                println!("        columns: {}", e.columns().join(", "));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
