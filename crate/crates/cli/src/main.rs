//! `evoc`: run single simulations, experiment presets, or the exhaustive
//! fitness oracle.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 I/O error.

mod config;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use evoc_core::harness::{self, ExperimentKind, ExperimentSpec, HarnessError, DEFAULT_RUNS};
use evoc_core::model::{enumerate_steps, fitness_step, optimal_steps};
use evoc_core::WorldConfig;

#[derive(Parser)]
#[command(name = "evoc", version, about = "Cultural evolution simulator with action chaining")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its metrics as CSV.
    Run {
        /// JSON configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Run seed; overrides the config file (default 1).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "./out")]
        out: PathBuf,
    },
    /// Run an experiment preset: fig3, fig4 or fig5.
    Experiment {
        name: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_RUNS)]
        runs: usize,
        /// First seed; run i uses seed + i.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "./out")]
        out: PathBuf,
    },
    /// Enumerate all single steps and print the fitness histogram and optima.
    Oracle,
}

enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<WorldConfig, Failure> {
    let mut cfg = match path {
        None => WorldConfig::default(),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            config::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))
}

fn cmd_run(config: Option<&Path>, seed: Option<u64>, out: &Path) -> Result<(), Failure> {
    let cfg = load_config(config, seed)?;
    let records = evoc_core::run(&cfg).map_err(|e| Failure::Usage(e.to_string()))?;
    let series = harness::aggregate("run", std::slice::from_ref(&records))?;
    create_dir(out)?;
    let path = out.join("run.csv");
    harness::write_csv(&series, &path)?;
    let last = records.last().expect("run always yields the initial record");
    println!("seed: {}", cfg.seed);
    println!("iterations: {}", last.iteration);
    println!("final mean fitness: {}", last.mean_fitness);
    println!("final diversity: {}", last.diversity);
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_experiment(
    name: &str,
    config: Option<&Path>,
    runs: usize,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), Failure> {
    let kind = ExperimentKind::parse(name)?;
    if runs == 0 {
        return Err(Failure::Usage("--runs must be at least 1".into()));
    }
    let base = load_config(config, seed)?;
    let spec = ExperimentSpec::preset(kind, runs, base);
    let output = harness::run_experiment(&spec, out)?;
    for agg in &output.aggregates {
        let last = agg.final_mean().expect("non-empty series");
        println!(
            "{}: final mean fitness {:.3}, final diversity {:.2} ({} runs)",
            agg.condition_label, last.mean_fitness, last.diversity, runs
        );
    }
    for f in &output.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_oracle() {
    let steps = enumerate_steps();
    let mut histogram: BTreeMap<u32, usize> = BTreeMap::new();
    for s in &steps {
        *histogram.entry((fitness_step(s).value() * 2.0) as u32).or_default() += 1;
    }
    let optima = optimal_steps();
    let max = optima.first().map(|s| fitness_step(s).value()).unwrap_or(0.0);
    println!("total enumerated: {}", steps.len());
    println!("fitness histogram:");
    for (half, count) in &histogram {
        println!("  {:>4.1}: {count}", f64::from(*half) / 2.0);
    }
    println!("maximum fitness: {max:.1}");
    println!("optimal actions: {}", optima.len());
    for s in &optima {
        println!("  #{:03} {s}", s.ordinal());
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first} (try `evoc --help`)");
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Run { config, seed, out } => cmd_run(config.as_deref(), *seed, out),
        Command::Experiment {
            name,
            config,
            runs,
            seed,
            out,
        } => cmd_experiment(name, config.as_deref(), *runs, *seed, out),
        Command::Oracle => {
            cmd_oracle();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
