//! The four learners: plain, double, dueling and prioritized-replay DQN.
//!
//! All four share one training loop ([`Agent::train_step`]); they differ
//! only in the network architecture, the bootstrap target and how replay
//! batches are drawn and weighted.

mod learner;
mod policy;
mod replay;
mod sum_tree;
mod targets;

use thiserror::Error;

use crate::nn::NnError;

pub use learner::{Agent, AgentConfig, Memory, PerConfig, TrainStats};
pub use policy::{epsilon_greedy, EpsilonSchedule};
pub use replay::{is_weights, PerSample, PrioritizedReplay, Ring, Transition, UniformReplay};
pub use sum_tree::SumTree;
pub use targets::{compute_target, compute_targets, td_error, Variant};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error(transparent)]
    Network(#[from] NnError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("replay buffer is empty")]
    EmptyBuffer,
    #[error("all replay priorities are zero")]
    DegenerateDistribution,
    #[error("training diverged: {0}")]
    Diverged(String),
}
