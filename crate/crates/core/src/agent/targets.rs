use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::nn::{argmax, QNetwork};

use super::{AgentError, Transition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Dql,
    Ddql,
    Dueling,
    Per,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Dql, Variant::Ddql, Variant::Dueling, Variant::Per];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Dql => "dql",
            Variant::Ddql => "ddql",
            Variant::Dueling => "dueling",
            Variant::Per => "per",
        }
    }

    pub fn uses_dueling(self) -> bool {
        self == Variant::Dueling
    }

    pub fn uses_priorities(self) -> bool {
        self == Variant::Per
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| AgentError::InvalidArgument(format!("unknown variant `{s}` (dql|ddql|dueling|per)")))
    }
}

fn finite(values: Vec<f64>) -> Result<Vec<f64>, AgentError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(values)
    } else {
        Err(AgentError::Diverged(format!("network output {values:?}")))
    }
}

/// Bootstrapped target for one transition. Terminal transitions return the
/// reward without touching either network. The double variant picks the
/// next action with `online` and evaluates it with `target`; the others take
/// the target network's maximum.
pub fn compute_target(
    t: &Transition,
    online: &QNetwork,
    target: &QNetwork,
    gamma: f64,
    variant: Variant,
) -> Result<f64, AgentError> {
    if t.terminal {
        return Ok(t.reward);
    }
    let q_next = finite(target.q_values(&t.next_state)?)?;
    let bootstrap = match variant {
        Variant::Ddql => {
            let pick = argmax(&finite(online.q_values(&t.next_state)?)?).unwrap();
            q_next[pick]
        }
        _ => q_next.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    };
    Ok(t.reward + gamma * bootstrap)
}

pub fn compute_targets(
    batch: &[&Transition],
    online: &QNetwork,
    target: &QNetwork,
    gamma: f64,
    variant: Variant,
) -> Result<Vec<f64>, AgentError> {
    batch.iter().map(|t| compute_target(t, online, target, gamma, variant)).collect()
}

/// `|y - Q(s, a)|` with `y` from the variant's own target rule.
pub fn td_error(
    t: &Transition,
    online: &QNetwork,
    target: &QNetwork,
    gamma: f64,
    variant: Variant,
) -> Result<f64, AgentError> {
    let y = compute_target(t, online, target, gamma, variant)?;
    let q = finite(online.q_values(&t.state)?)?;
    let a = q.get(t.action).ok_or_else(|| AgentError::InvalidArgument(format!("action {}", t.action)))?;
    Ok((y - a).abs())
}
