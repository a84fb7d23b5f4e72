use serde::{Deserialize, Serialize};

use crate::nn::argmax;
use crate::rng::CounterRng;

use super::AgentError;

/// With probability `epsilon` a uniformly random action, otherwise the
/// greedy one (lowest index on ties). Always consumes one uniform draw, plus
/// one more when exploring.
pub fn epsilon_greedy(q_values: &[f64], epsilon: f64, rng: &mut CounterRng) -> Result<usize, AgentError> {
    if q_values.is_empty() {
        return Err(AgentError::InvalidArgument("no action values".into()));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(AgentError::InvalidArgument(format!("epsilon {epsilon} outside [0, 1]")));
    }
    if rng.uniform() < epsilon {
        Ok(rng.below(q_values.len()))
    } else {
        Ok(argmax(q_values).unwrap())
    }
}

/// Linear decay from `start` to `end` over the first `decay_fraction` of training.
/// Training is measured in whatever unit the caller counts (the harness uses episodes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_fraction: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self { start: 1.0, end: 0.05, decay_fraction: 0.5 }
    }
}

impl EpsilonSchedule {
    pub fn validate(&self) -> Result<(), AgentError> {
        let unit = 0.0..=1.0;
        if !unit.contains(&self.start) || !unit.contains(&self.end) || self.end > self.start {
            return Err(AgentError::InvalidArgument(format!(
                "epsilon schedule needs 0 <= end <= start <= 1, got {} -> {}",
                self.start, self.end
            )));
        }
        if !unit.contains(&self.decay_fraction) {
            return Err(AgentError::InvalidArgument(format!("epsilon decay_fraction {}", self.decay_fraction)));
        }
        Ok(())
    }

    /// Exploration rate after `done` of `total` training units.
    pub fn value(&self, done: u64, total: u64) -> f64 {
        let horizon = self.decay_fraction * total as f64;
        if horizon <= 0.0 {
            return self.end;
        }
        let t = done as f64 / horizon;
        if t >= 1.0 {
            self.end
        } else {
            self.start + (self.end - self.start) * t
        }
    }
}
