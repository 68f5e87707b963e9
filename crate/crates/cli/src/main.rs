use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use qigmn::envs::{spec_for, ENV_NAMES};
use qigmn::harness::{evaluate_file, run_experiment, ExperimentConfig};
use qigmn::par::Execution;

#[derive(Parser)]
#[command(name = "qigmn", version, about = "Q-learning with an incremental Gaussian mixture")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one agent per seed and write CSVs, models and a summary.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seeds in the config file.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Overrides the output directory in the config file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run seeds on a thread pool.
        #[arg(long)]
        parallel: bool,
    },
    /// Run the greedy policy of a saved model.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        env: String,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        parallel: bool,
    },
    /// List the available environments.
    ListEnvs,
}

fn train(config: PathBuf, seeds: Option<Vec<u64>>, out: Option<PathBuf>, parallel: bool) -> Result<bool> {
    let mut cfg = ExperimentConfig::load(&config).with_context(|| format!("reading {}", config.display()))?;
    if let Some(seeds) = seeds {
        cfg.seeds = seeds;
    }
    if let Some(out) = out {
        cfg.out_dir = out;
    }
    cfg.validate()?;
    let exp = run_experiment(&cfg, Execution::from_flag(parallel))?;
    let s = &exp.summary;
    for seed in &s.seed {
        let solve = seed
            .solve_episode
            .map_or_else(|| "unsolved".to_string(), |e| e.to_string());
        println!(
            "seed {:>4}  episodes {:>5}  solve {:>8}  components {:>4}",
            seed.seed, seed.episodes, solve, seed.final_components
        );
        if let Some(err) = &seed.error {
            eprintln!("seed {} aborted: {err}", seed.seed);
        }
    }
    println!("all seeds ({} solved of {}): {}", s.seeds_solved, s.seeds_total, s.all_seeds);
    if let Some(solved) = &s.solved_seeds {
        println!("solved seeds only: {solved}");
    }
    println!("output: {}", cfg.out_dir.display());
    Ok(!exp.any_aborted())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Train {
            config,
            seeds,
            out,
            parallel,
        } => train(config, seeds, out, parallel),
        Command::Evaluate {
            model,
            env,
            episodes,
            seed,
            parallel,
        } => {
            let e = evaluate_file(&model, &env, episodes, seed, Execution::from_flag(parallel))
                .with_context(|| format!("evaluating {}", model.display()))?;
            println!("episodes {}  mean return {}  std {}", e.stats.n, e.stats.mean, e.stats.std);
            Ok(true)
        }
        Command::ListEnvs => {
            for name in ENV_NAMES {
                let spec = spec_for(name)?;
                println!(
                    "{name:<16} obs {}  actions {}  max steps {:>3}  solve at {}",
                    spec.observation_dim(),
                    spec.action_count,
                    spec.max_steps,
                    spec.solve_threshold
                );
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
