use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use freeway_dqn::agent::Variant;
use freeway_dqn::harness::{self, HarnessError, RunConfig};

#[derive(Parser)]
#[command(name = "freeway-dqn", version, about = "DQN variants for freeway lane-change decisions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one variant and save its metrics and parameters.
    Train(Common),
    /// Run greedy episodes with saved parameters.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Parameter file written by `train`.
        #[arg(long)]
        params: PathBuf,
    },
    /// Train and evaluate all four variants on a shared seed schedule.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_variant)]
    variant: Option<Variant>,
    #[arg(long)]
    episodes: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: freeway_dqn::agent::AgentError| e.to_string())
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, HarnessError> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.run.seed = seed;
        }
        if let Some(v) = self.variant {
            config.agent.variant = v;
        }
        if let Some(n) = self.episodes {
            config.run.episodes = n;
        }
        if let Some(out) = &self.out {
            config.run.output_dir = out.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Train(common) => {
            let config = common.resolve()?;
            let out = harness::train(&config, &config.run.output_dir)?;
            let last = harness::trailing_mean(&out.metrics, 30);
            println!(
                "trained {} for {} episodes; trailing-30 normalized reward {last:.4}; output in {}",
                config.agent.variant,
                out.metrics.len(),
                config.run.output_dir.display()
            );
        }
        Command::Eval { common, params } => {
            let config = common.resolve()?;
            let out = harness::evaluate(&config, &params, &config.run.output_dir)?;
            let rewards: Vec<f64> = out.metrics.iter().map(|m| m.norm_reward).collect();
            println!(
                "evaluated {} episodes; mean normalized reward {:.4}; collision rate {:.2}",
                out.metrics.len(),
                harness::metrics::mean(&rewards),
                harness::collision_rate(&out.metrics)
            );
        }
        Command::Compare(common) => {
            let config = common.resolve()?;
            let report = harness::compare(&config, &config.run.output_dir)?;
            print!("{}", report.summary_csv());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error kind={} message={message:?}", e.kind());
            ExitCode::FAILURE
        }
    }
}
