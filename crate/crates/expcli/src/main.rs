use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use expcli::report::lottery_map;
use expcli::{compare_iia, emit_report, load_report, run_experiment, ExperimentConfig, Method};
use maxlottery::prefs::{margin_matrix, pairwise_counts};
use maxlottery::solver::{maximal_lottery_lp, verify_maximality, LP_EPSILON};
use maxlottery::voting::{borda_scores, condorcet_winner, majority_winners, smith_set};
use maxlottery::PreferenceProfile;
use serde_json::json;

#[derive(Parser)]
#[command(name = "expcli", version, about = "Run preference aggregation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample data from a population and aggregate it with every method.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Replaces the config's seeds. Repeatable.
        #[arg(long = "seed")]
        seeds: Vec<u64>,
        /// Output directory; defaults to the config's, then `out/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        methods: Vec<Method>,
        #[arg(long)]
        dataset_size: Option<usize>,
    },
    /// Compare two reports on the alternatives they share.
    CompareIia {
        #[arg(long)]
        small: PathBuf,
        #[arg(long)]
        large: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        shared: Vec<String>,
        /// Also write the comparison to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact maximal lottery and voting summary of a population file.
    Solve {
        #[arg(long)]
        profile: PathBuf,
    },
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            seeds,
            out,
            methods,
            dataset_size,
        } => {
            let mut config = ExperimentConfig::load(config)?;
            if !seeds.is_empty() {
                config.seeds = seeds;
            }
            if !methods.is_empty() {
                config.methods = methods;
            }
            if let Some(n) = dataset_size {
                config.dataset_size = n;
            }
            let dir = out
                .or_else(|| config.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("out").join(&config.name));
            let report = run_experiment(&config)?;
            emit_report(&report, &dir)?;
            for run in &report.runs {
                for (method, result) in &run.results {
                    let probs: Vec<String> = result.lottery.iter().map(|(a, p)| format!("{a}={p:.4}")).collect();
                    println!("seed {} {method:<20} {}", run.seed, probs.join(" "));
                }
            }
            println!("wrote {}", dir.display());
        }
        Command::CompareIia {
            small,
            large,
            shared,
            out,
        } => {
            let shared: Vec<&str> = shared.iter().map(String::as_str).collect();
            let comparison = compare_iia(&load_report(small)?, &load_report(large)?, &shared)?;
            let text = serde_json::to_string_pretty(&comparison)?;
            println!("{text}");
            if let Some(path) = out {
                std::fs::write(path, text + "\n")?;
            }
        }
        Command::Solve { profile } => {
            let profile = PreferenceProfile::load(profile)?;
            let counts = pairwise_counts(&profile);
            let margin = margin_matrix(&counts);
            let lottery = maximal_lottery_lp(&margin)?;
            let certificate = verify_maximality(&margin, &lottery, LP_EPSILON)?;
            let label = |i: usize| profile.alternatives().label(i).to_string();
            let borda = borda_scores(&counts, false).to_f64();
            let summary = json!({
                "maximal_lottery": lottery_map(&lottery),
                "certificate": {
                    "worst_column_payoff": certificate.worst_column_payoff,
                    "epsilon": certificate.epsilon,
                    "is_maximal": certificate.is_maximal,
                },
                "condorcet_winner": condorcet_winner(&counts).map(label),
                "majority_winners": majority_winners(&profile).into_iter().map(label).collect::<Vec<_>>(),
                "smith_set": smith_set(&counts).into_iter().map(label).collect::<Vec<_>>(),
                "borda": profile.alternatives().labels().iter().cloned().zip(borda).collect::<indexmap::IndexMap<_, _>>(),
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    Ok(())
}
