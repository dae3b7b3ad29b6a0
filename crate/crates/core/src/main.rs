use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};

use hybrid_multicast::experiment::{
    emit, preset, read_records_csv, run_experiment, summarize, ExperimentConfig,
};

#[derive(Parser)]
#[command(
    version,
    about = "Hybrid precoding for max-min fair multicasting: Monte Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write records, summary and plot data.
    #[command(group(ArgGroup::new("source").required(true).args(["config", "preset"])))]
    Run {
        /// JSON experiment configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Built-in configuration: fig1a, fig1b or fig1c.
        #[arg(long)]
        preset: Option<String>,
        /// Override the number of trials.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: results/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record zero wall times so outputs are reproducible byte for byte.
        #[arg(long)]
        no_timing: bool,
    },
    /// Recompute the summary of a records CSV.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(config: Option<PathBuf>, preset_name: Option<String>) -> Result<ExperimentConfig> {
    match (config, preset_name) {
        (Some(path), None) => {
            let text =
                fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text)
                .with_context(|| format!("parsing {}", path.display()))
        }
        (None, Some(name)) => Ok(preset(&name)?),
        _ => bail!("give exactly one of --config and --preset"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            preset,
            trials,
            seed,
            out,
            no_timing,
        } => {
            let mut cfg = load_config(config, preset)?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if no_timing {
                cfg.record_timing = false;
            }
            cfg.validate()?;
            let out = out.unwrap_or_else(|| PathBuf::from("results").join(&cfg.name));
            let run = run_experiment(&cfg)?;
            let records = run.records();
            for f in &run.failures {
                eprintln!("trial {} {}: {}", f.trial, f.method, f.message);
            }
            if records.is_empty() {
                bail!("every trial failed");
            }
            let summary = summarize(&records, cfg.cdf_grid.as_ref())?;
            let paths = emit(&records, &summary, &out)?;
            let cfg_path = out.join("config.json");
            fs::write(&cfg_path, serde_json::to_string_pretty(&cfg)? + "\n")
                .with_context(|| format!("writing {}", cfg_path.display()))?;
            for snr in summary.snr_points() {
                let line: Vec<String> = summary
                    .methods()
                    .iter()
                    .filter_map(|m| {
                        summary
                            .row(m, snr)
                            .map(|r| format!("{m}={:.3}", r.mean_rate_bps_hz))
                    })
                    .collect();
                println!("{snr:>6} dB  {}", line.join("  "));
            }
            println!(
                "wrote {}",
                paths.records_csv.parent().unwrap_or(&out).display()
            );
            Ok(run.failures.is_empty())
        }
        Command::Summarize { input, out } => {
            let records = read_records_csv(&input)?;
            let summary = summarize(&records, None)?;
            fs::write(&out, serde_json::to_string_pretty(&summary)? + "\n")
                .with_context(|| format!("writing {}", out.display()))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some solves failed; see messages above");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
