//! `speclab`: run, validate and list channel-spectrum experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use speclab::experiment::{preset, run_experiment, ExperimentConfig, PRESETS};
use speclab::Error;

const EXIT_RUN_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "speclab",
    version,
    about = "Quantum channel spectra and real Ginibre comparisons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment from a config file or a preset name.
    Run {
        config: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Output directory (default: the config's out_dir, else speclab-out/<name>).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Worker threads (default: SPECLAB_THREADS, else all cores).
        #[arg(long, env = "SPECLAB_THREADS")]
        threads: Option<usize>,
    },
    /// Parse and validate a config, printing it with defaults filled in.
    Validate {
        config: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Shipped presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Debug, Args)]
struct Overrides {
    /// Replace the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replace the config's sample count.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum PresetAction {
    /// List preset names with what each one is expected to show.
    List,
    /// Print a preset's config.
    Show { name: String },
}

/// Loads `spec` as a file if it exists, otherwise as a preset name.
fn load(spec: &str, overrides: &Overrides) -> Result<(ExperimentConfig, String), Error> {
    let path = Path::new(spec);
    let (mut config, label) = if path.exists() {
        let label = path.file_stem().map_or_else(
            || "experiment".to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        (ExperimentConfig::from_path(path)?, label)
    } else if let Some(p) = preset(spec) {
        (p.config()?, p.name.to_string())
    } else {
        return Err(Error::InvalidConfig {
            errors: vec![format!(
                "`{spec}` is neither a readable file nor a preset name"
            )],
        });
    };
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(samples) = overrides.samples {
        config.samples = samples;
    }
    config.validate()?;
    Ok((config, label))
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Presets {
            action: PresetAction::List,
        } => {
            for p in PRESETS {
                println!("{:<20} {}", p.name, p.summary);
                println!("{:<20} expect: {}", "", p.target);
            }
            ExitCode::SUCCESS
        }
        Command::Presets {
            action: PresetAction::Show { name },
        } => match preset(&name) {
            Some(p) => {
                print!("{}", p.source);
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: unknown preset `{name}`");
                ExitCode::from(EXIT_INVALID)
            }
        },
        Command::Validate { config, overrides } => match load(&config, &overrides) {
            Ok((c, _)) => {
                let runs = c.points().len() * c.samples_per_point();
                match toml::to_string_pretty(&c.resolved()) {
                    Ok(text) => print!("{text}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_INVALID);
                    }
                }
                eprintln!("ok: {} with {runs} run(s)", c.experiment.name());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_INVALID)
            }
        },
        Command::Run {
            config,
            overrides,
            out_dir,
            threads,
        } => {
            let (c, label) = match load(&config, &overrides) {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_INVALID);
                }
            };
            let out_dir = out_dir
                .or_else(|| c.out_dir.clone())
                .unwrap_or_else(|| PathBuf::from("speclab-out").join(label));
            let threads = threads.unwrap_or_else(default_threads);
            match run_experiment(&c, threads, &out_dir) {
                Ok(summary) => {
                    for f in &summary.files {
                        println!("wrote {}", f.display());
                    }
                    eprintln!(
                        "{} run(s), {} failed, {:.1}s",
                        summary.runs,
                        summary.failures.len(),
                        summary.wall_time.as_secs_f64()
                    );
                    for (id, msg) in &summary.failures {
                        eprintln!("run {id} failed: {msg}");
                    }
                    if summary.succeeded() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_RUN_FAILED)
                    }
                }
                Err(e @ Error::InvalidConfig { .. }) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_INVALID)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_RUN_FAILED)
                }
            }
        }
    }
}
