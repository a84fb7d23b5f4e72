use serde::{Deserialize, Serialize};

use crate::nn::{argmax, Batch, NetworkSpec, QNetwork};
use crate::rng::CounterRng;

use super::policy::{epsilon_greedy, EpsilonSchedule};
use super::replay::{is_weights, PrioritizedReplay, Transition, UniformReplay};
use super::targets::{compute_targets, Variant};
use super::AgentError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerConfig {
    /// Priority exponent.
    pub psi: f64,
    /// Importance-sampling exponent at the start and end of training.
    pub lambda_start: f64,
    pub lambda_end: f64,
    /// Added to every |TD error| so no transition becomes unsampleable.
    pub epsilon: f64,
}

impl Default for PerConfig {
    fn default() -> Self {
        Self { psi: 0.6, lambda_start: 0.4, lambda_end: 1.0, epsilon: 1e-3 }
    }
}

impl PerConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let unit = 0.0..=1.0;
        if !(self.psi >= 0.0 && self.psi.is_finite()) {
            return Err(AgentError::InvalidArgument(format!("per.psi {}", self.psi)));
        }
        if !unit.contains(&self.lambda_start) || !unit.contains(&self.lambda_end) {
            return Err(AgentError::InvalidArgument("per.lambda_start and per.lambda_end must be in [0, 1]".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(AgentError::InvalidArgument(format!("per.epsilon {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn lambda_at(&self, progress: f64) -> f64 {
        self.lambda_start + (self.lambda_end - self.lambda_start) * progress.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub variant: Variant,
    pub gamma: f64,
    pub lr: f64,
    pub epsilon: EpsilonSchedule,
    pub batch_size: usize,
    pub capacity: usize,
    /// Train steps between target-network refreshes.
    pub target_sync: u64,
    /// Global gradient-norm limit; 0 disables clipping.
    pub grad_clip: f64,
    /// Hidden widths of the plain network.
    pub hidden: Vec<usize>,
    /// Shared trunk and per-head hidden widths of the dueling network.
    pub dueling_trunk: Vec<usize>,
    pub dueling_head: Vec<usize>,
    pub per: PerConfig,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Dql,
            gamma: 0.8,
            lr: 0.2,
            epsilon: EpsilonSchedule::default(),
            batch_size: 32,
            capacity: 15_000,
            target_sync: 50,
            grad_clip: 10.0,
            hidden: vec![128, 128],
            dueling_trunk: vec![128],
            dueling_head: vec![64],
            per: PerConfig::default(),
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: String| Err(AgentError::InvalidArgument(m));
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("agent.gamma {} outside [0, 1)", self.gamma));
        }
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return bad(format!("agent.lr {}", self.lr));
        }
        if self.batch_size == 0 || self.capacity < self.batch_size {
            return bad(format!("need 0 < batch_size <= capacity, got {} / {}", self.batch_size, self.capacity));
        }
        if self.target_sync == 0 {
            return bad("agent.target_sync must be positive".into());
        }
        if !(self.grad_clip >= 0.0) {
            return bad(format!("agent.grad_clip {}", self.grad_clip));
        }
        self.epsilon.validate()?;
        self.per.validate()
    }

    pub fn network_spec(&self, input: usize, actions: usize) -> NetworkSpec {
        if self.variant.uses_dueling() {
            NetworkSpec::dueling(input, &self.dueling_trunk, &self.dueling_head, actions)
        } else {
            NetworkSpec::plain(input, &self.hidden, actions)
        }
    }
}

#[derive(Debug, Clone)]
pub enum Memory {
    Uniform(UniformReplay),
    Prioritized(PrioritizedReplay),
}

impl Memory {
    pub fn len(&self) -> usize {
        match self {
            Memory::Uniform(m) => m.len(),
            Memory::Prioritized(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Outcome of one gradient step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainStats {
    pub loss: f64,
    /// Mean |TD error| over the batch, measured before the update.
    pub mean_td_error: f64,
}

#[derive(Debug, Clone)]
pub struct Agent {
    config: AgentConfig,
    online: QNetwork,
    target: QNetwork,
    memory: Memory,
    rng: CounterRng,
    train_steps: u64,
}

impl Agent {
    /// Both networks start from the same weights, drawn from `rng`; the
    /// stream is then kept for exploration and replay sampling.
    pub fn new(config: AgentConfig, input: usize, actions: usize, mut rng: CounterRng) -> Result<Self, AgentError> {
        config.validate()?;
        let online = QNetwork::new(&config.network_spec(input, actions), &mut rng)?;
        let target = online.copy_params();
        let memory = if config.variant.uses_priorities() {
            Memory::Prioritized(PrioritizedReplay::new(config.capacity, config.per)?)
        } else {
            Memory::Uniform(UniformReplay::new(config.capacity)?)
        };
        Ok(Self { config, online, target, memory, rng, train_steps: 0 })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn online(&self) -> &QNetwork {
        &self.online
    }

    pub fn target(&self) -> &QNetwork {
        &self.target
    }

    pub fn memory(&self) -> &Memory {
        &self.memory
    }

    pub fn train_steps(&self) -> u64 {
        self.train_steps
    }

    pub fn act(&mut self, observation: &[f64], epsilon: f64) -> Result<usize, AgentError> {
        let q = self.online.q_values(observation)?;
        epsilon_greedy(&q, epsilon, &mut self.rng)
    }

    pub fn greedy(&self, observation: &[f64]) -> Result<usize, AgentError> {
        let q = self.online.q_values(observation)?;
        argmax(&q).ok_or_else(|| AgentError::InvalidArgument("no action values".into()))
    }

    pub fn remember(&mut self, t: Transition) {
        match &mut self.memory {
            Memory::Uniform(m) => {
                m.push(t);
            }
            Memory::Prioritized(m) => {
                m.push(t);
            }
        }
    }

    /// One minibatch update. `progress` in `[0, 1]` is the fraction of
    /// training completed and anneals the importance-sampling exponent.
    /// Returns `None` while the buffer holds fewer than `batch_size` items.
    pub fn train_step(&mut self, progress: f64) -> Result<Option<TrainStats>, AgentError> {
        let k = self.config.batch_size;
        if self.memory.len() < k {
            return Ok(None);
        }
        let (slots, weights) = match &self.memory {
            Memory::Uniform(m) => (m.sample(k, &mut self.rng)?, vec![1.0; k]),
            Memory::Prioritized(m) => {
                let s = m.sample(k, &mut self.rng)?;
                let lambda = self.config.per.lambda_at(progress);
                let w = is_weights(&s.probabilities, m.len(), lambda);
                (s.slots, w)
            }
        };
        let ring = match &self.memory {
            Memory::Uniform(m) => m.ring(),
            Memory::Prioritized(m) => m.ring(),
        };
        let batch: Vec<&Transition> = slots.iter().map(|&s| ring.get(s)).collect();
        let targets = compute_targets(&batch, &self.online, &self.target, self.config.gamma, self.config.variant)?;
        let nn_batch = Batch {
            states: batch.iter().map(|t| t.state.as_slice()).collect(),
            actions: batch.iter().map(|t| t.action).collect(),
            targets: targets.clone(),
            weights,
        };
        let (loss, mut grads, predictions) = self
            .online
            .loss_grad_predictions(&nn_batch)
            .map_err(|e| AgentError::Diverged(e.to_string()))?;
        let deltas: Vec<f64> = targets.iter().zip(&predictions).map(|(y, q)| (y - q).abs()).collect();
        let mean_td_error = deltas.iter().sum::<f64>() / k as f64;

        if self.config.grad_clip > 0.0 {
            grads.clip_global_norm(self.config.grad_clip);
        }
        self.online.sgd_step(&grads, self.config.lr).map_err(|e| AgentError::Diverged(e.to_string()))?;
        if let Memory::Prioritized(m) = &mut self.memory {
            m.update_priorities(&slots, &deltas)?;
        }
        self.train_steps += 1;
        if self.train_steps % self.config.target_sync == 0 {
            self.target = self.online.copy_params();
        }
        Ok(Some(TrainStats { loss, mean_td_error }))
    }
}
