use crate::rng::CounterRng;

use super::sum_tree::SumTree;
use super::{AgentError, PerConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub terminal: bool,
}

/// Fixed-capacity ring of transitions; once full, each push overwrites the oldest.
#[derive(Debug, Clone)]
pub struct Ring {
    capacity: usize,
    items: Vec<Transition>,
    cursor: usize,
}

impl Ring {
    pub fn new(capacity: usize) -> Result<Self, AgentError> {
        if capacity == 0 {
            return Err(AgentError::InvalidArgument("replay capacity must be positive".into()));
        }
        Ok(Self { capacity, items: Vec::with_capacity(capacity.min(1 << 16)), cursor: 0 })
    }

    /// Stores `t` and returns its slot.
    pub fn push(&mut self, t: Transition) -> usize {
        let slot = self.cursor;
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[slot] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
        slot
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, slot: usize) -> &Transition {
        &self.items[slot]
    }

    /// Stored transitions from oldest to newest.
    pub fn chronological(&self) -> impl Iterator<Item = &Transition> {
        let split = if self.items.len() < self.capacity { 0 } else { self.cursor };
        self.items[split..].iter().chain(&self.items[..split])
    }
}

#[derive(Debug, Clone)]
pub struct UniformReplay {
    ring: Ring,
}

impl UniformReplay {
    pub fn new(capacity: usize) -> Result<Self, AgentError> {
        Ok(Self { ring: Ring::new(capacity)? })
    }

    pub fn push(&mut self, t: Transition) -> usize {
        self.ring.push(t)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    /// `k` slots drawn uniformly with replacement.
    pub fn sample(&self, k: usize, rng: &mut CounterRng) -> Result<Vec<usize>, AgentError> {
        if self.ring.is_empty() {
            return Err(AgentError::EmptyBuffer);
        }
        Ok((0..k).map(|_| rng.below(self.ring.len())).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerSample {
    pub slots: Vec<usize>,
    /// Sampling probability of each drawn slot at draw time.
    pub probabilities: Vec<f64>,
}

/// Proportional prioritized replay. Leaf `i` of the sum tree holds the
/// already exponentiated priority of ring slot `i`.
#[derive(Debug, Clone)]
pub struct PrioritizedReplay {
    ring: Ring,
    tree: SumTree,
    config: PerConfig,
}

impl PrioritizedReplay {
    pub fn new(capacity: usize, config: PerConfig) -> Result<Self, AgentError> {
        config.validate()?;
        Ok(Self { ring: Ring::new(capacity)?, tree: SumTree::new(capacity), config })
    }

    /// Stores `t` with the largest priority seen so far (1.0 at first).
    pub fn push(&mut self, t: Transition) -> usize {
        let p = self.tree.max_priority();
        let slot = self.ring.push(t);
        self.tree.set(slot, p);
        slot
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn tree(&self) -> &SumTree {
        &self.tree
    }

    pub fn config(&self) -> &PerConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    pub fn probability(&self, slot: usize) -> f64 {
        self.tree.get(slot) / self.tree.total()
    }

    /// Stratified draw: the total mass is cut into `k` equal segments and one
    /// point is drawn uniformly inside each.
    pub fn sample(&self, k: usize, rng: &mut CounterRng) -> Result<PerSample, AgentError> {
        if self.ring.is_empty() {
            return Err(AgentError::EmptyBuffer);
        }
        let total = self.tree.total();
        if !(total > 0.0) {
            return Err(AgentError::DegenerateDistribution);
        }
        let segment = total / k as f64;
        let mut slots = Vec::with_capacity(k);
        let mut probabilities = Vec::with_capacity(k);
        for j in 0..k {
            let u = segment * (j as f64 + rng.uniform());
            let slot = self.tree.find(u);
            slots.push(slot);
            probabilities.push(self.tree.get(slot) / total);
        }
        Ok(PerSample { slots, probabilities })
    }

    /// Stored priority for a TD error: `(|delta| + eps)^psi`.
    pub fn priority_for(&self, delta: f64) -> f64 {
        (delta.abs() + self.config.epsilon).powf(self.config.psi)
    }

    pub fn update_priorities(&mut self, slots: &[usize], deltas: &[f64]) -> Result<(), AgentError> {
        if slots.len() != deltas.len() {
            return Err(AgentError::InvalidArgument(format!(
                "{} slots but {} TD errors",
                slots.len(),
                deltas.len()
            )));
        }
        for (&slot, &d) in slots.iter().zip(deltas) {
            if slot >= self.ring.len() {
                return Err(AgentError::InvalidArgument(format!("slot {slot} not filled")));
            }
            if !d.is_finite() {
                return Err(AgentError::Diverged(format!("TD error {d}")));
            }
            let p = self.priority_for(d);
            self.tree.set(slot, p);
        }
        Ok(())
    }
}

/// Importance-sampling weights `(1 / (n P(i)))^lambda`, scaled so the largest is 1.
pub fn is_weights(probabilities: &[f64], n: usize, lambda: f64) -> Vec<f64> {
    let raw: Vec<f64> = probabilities.iter().map(|&p| (1.0 / (n as f64 * p)).powf(lambda)).collect();
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    raw.iter().map(|w| w / max).collect()
}
