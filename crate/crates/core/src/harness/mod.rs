//! Training, evaluation and comparison drivers with CSV output.

mod compare;
mod config;
pub mod metrics;
mod run;

use std::path::Path;

use thiserror::Error;

use crate::agent::AgentError;
use crate::nn::PersistError;
use crate::sim::SimError;

pub use compare::{collision_rate, compare, leading_mean, trailing_mean, ComparisonReport, VariantResult, SUMMARY_HEADER};
pub use config::{RunConfig, RunSection};
pub use run::{
    eval_scenario_seed, evaluate, evaluate_network, random_baseline, train, train_scenario_seed, write_eval,
    EvalOutput, TrainOutput, STREAM_AGENT, STREAM_BASELINE_ACTIONS, STREAM_EVAL_SCENARIOS, STREAM_TRAIN_SCENARIOS,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Params(#[from] PersistError),
    #[error("training diverged at episode {episode}, step {step}: {message}")]
    Diverged { episode: u64, step: u32, message: String },
    #[error("variant {variant}: {source}")]
    Variant { variant: &'static str, source: Box<HarnessError> },
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), source }
    }

    /// Short category name for machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Config { .. } => "config",
            HarnessError::Io { .. } => "io",
            HarnessError::Sim(_) => "sim",
            HarnessError::Agent(_) => "agent",
            HarnessError::Params(_) => "params",
            HarnessError::Diverged { .. } => "diverged",
            HarnessError::Variant { source, .. } => source.kind(),
        }
    }
}

impl From<crate::nn::NnError> for HarnessError {
    fn from(e: crate::nn::NnError) -> Self {
        HarnessError::Agent(AgentError::Network(e))
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests;
