use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agent::AgentConfig;
use crate::sim::{
    ControlGains, IdmParams, MobilParams, RewardConfig, RoadConfig, ScenarioConfig, SimConfig, VehicleParams,
};

use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Training episodes.
    pub episodes: u64,
    /// Greedy evaluation episodes after training.
    pub eval_episodes: u64,
    /// Episodes of the uniform-random reference policy.
    pub baseline_episodes: u64,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { episodes: 2000, eval_episodes: 10, baseline_episodes: 100, seed: 0, output_dir: "runs".into() }
    }
}

/// Everything a run needs; the on-disk form is TOML with one table per
/// section, and every key is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub scenario: ScenarioConfig,
    pub road: RoadConfig,
    pub idm: IdmParams,
    pub mobil: MobilParams,
    pub gains: ControlGains,
    pub vehicle: VehicleParams,
    pub reward: RewardConfig,
    pub agent: AgentConfig,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, HarnessError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config {
            path: origin.to_string(),
            message: e.to_string().lines().collect::<Vec<_>>().join(" "),
        })?;
        config.validate().map_err(|e| HarnessError::Config { path: origin.to_string(), message: e.to_string() })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::io(path, source))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.sim_config(0).validate()?;
        self.agent.validate()?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Simulator settings with the given spawn seed.
    pub fn sim_config(&self, seed: u64) -> SimConfig {
        let mut scenario = self.scenario.clone();
        scenario.seed = seed;
        SimConfig {
            road: self.road,
            scenario,
            idm: self.idm,
            mobil: self.mobil,
            gains: self.gains,
            vehicle: self.vehicle,
            reward: self.reward,
        }
    }
}
