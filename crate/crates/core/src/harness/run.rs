use std::path::Path;

use crate::agent::{Agent, AgentError, Transition};
use crate::nn::{argmax, load_params, save_params, QNetwork};
use crate::rng::CounterRng;
use crate::sim::{Action, World, OBSERVATION_DIM};

use super::config::RunConfig;
use super::metrics::{actions_csv, metrics_csv, ActionRecord, EpisodeMetrics, EpisodeTally};
use super::{write_file, HarnessError};

/// Child streams of the master seed.
pub const STREAM_TRAIN_SCENARIOS: u64 = 1;
pub const STREAM_AGENT: u64 = 2;
pub const STREAM_EVAL_SCENARIOS: u64 = 3;
pub const STREAM_BASELINE_ACTIONS: u64 = 4;

pub fn train_scenario_seed(master: u64, episode: u64) -> u64 {
    CounterRng::new(master).split(STREAM_TRAIN_SCENARIOS).split_seed(episode)
}

pub fn eval_scenario_seed(master: u64, episode: u64) -> u64 {
    CounterRng::new(master).split(STREAM_EVAL_SCENARIOS).split_seed(episode)
}

fn max_reward(config: &RunConfig) -> f64 {
    config.scenario.max_steps() as f64
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub metrics: Vec<EpisodeMetrics>,
    pub network: QNetwork,
}

/// Trains `config.agent.variant` for `config.run.episodes` episodes and
/// writes `metrics.csv`, `params.txt` and the resolved `config.toml` to `out`.
/// On divergence the rows finished so far and a `diverged.txt` note are
/// still written.
pub fn train(config: &RunConfig, out: &Path) -> Result<TrainOutput, HarnessError> {
    config.validate()?;
    std::fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    write_file(&out.join("config.toml"), &config.to_toml())?;

    let master = config.run.seed;
    let mut agent =
        Agent::new(config.agent.clone(), OBSERVATION_DIM, Action::COUNT, CounterRng::new(master).split(STREAM_AGENT))?;
    let episodes = config.run.episodes;
    let mut metrics = Vec::new();
    let mut failure = None;

    'episodes: for episode in 0..config.run.episodes {
        let mut world = World::spawn(&config.sim_config(train_scenario_seed(master, episode)))?;
        let mut tally = EpisodeTally::new(config.agent.gamma);
        let mut obs = world.observe();
        // Exploration and the importance-sampling exponent follow the fraction
        // of training episodes completed.
        let epsilon = config.agent.epsilon.value(episode, episodes);
        let progress = episode as f64 / episodes as f64;
        while !world.is_terminated() {
            let action = agent.act(&obs, epsilon)?;
            let step = world.step(Action::from_index(action).unwrap())?;
            tally.record_step(step.reward, step.info.ego_speed);
            agent.remember(Transition {
                state: obs,
                action,
                reward: step.reward,
                next_state: step.observation.clone(),
                terminal: step.info.collision,
            });
            obs = step.observation;
            match agent.train_step(progress) {
                Ok(Some(s)) => tally.record_update(s.loss, s.mean_td_error),
                Ok(None) => {}
                Err(AgentError::Diverged(message)) => {
                    failure = Some(HarnessError::Diverged { episode, step: world.steps(), message });
                    break 'episodes;
                }
                Err(e) => return Err(e.into()),
            }
        }
        metrics.push(tally.finish(episode, world.distance(), world.collided(), epsilon, max_reward(config)));
    }

    write_file(&out.join("metrics.csv"), &metrics_csv(&metrics))?;
    if let Some(err) = failure {
        write_file(&out.join("diverged.txt"), &format!("{err}\n"))?;
        return Err(err);
    }
    save_params(&out.join("params.txt"), agent.online())?;
    Ok(TrainOutput { metrics, network: agent.online().clone() })
}

#[derive(Debug, Clone)]
pub struct EvalOutput {
    pub metrics: Vec<EpisodeMetrics>,
    pub actions: Vec<ActionRecord>,
}

fn play(
    config: &RunConfig,
    episodes: u64,
    mut choose: impl FnMut(&[f64]) -> Result<usize, HarnessError>,
) -> Result<EvalOutput, HarnessError> {
    let mut metrics = Vec::new();
    let mut actions = Vec::new();
    for episode in 0..episodes {
        let mut world = World::spawn(&config.sim_config(eval_scenario_seed(config.run.seed, episode)))?;
        let mut tally = EpisodeTally::new(config.agent.gamma);
        let mut obs = world.observe();
        while !world.is_terminated() {
            let action = choose(&obs)?;
            let step = world.step(Action::from_index(action).unwrap())?;
            tally.record_step(step.reward, step.info.ego_speed);
            actions.push(ActionRecord {
                episode,
                step: world.steps() - 1,
                action,
                reward: step.reward,
                ego_speed: step.info.ego_speed,
                ego_lane: step.info.ego_lane,
            });
            obs = step.observation;
        }
        metrics.push(tally.finish(episode, world.distance(), world.collided(), 0.0, max_reward(config)));
    }
    Ok(EvalOutput { metrics, actions })
}

/// Greedy roll-outs of `network` on `config.run.eval_episodes` fresh scenarios.
pub fn evaluate_network(config: &RunConfig, network: &QNetwork) -> Result<EvalOutput, HarnessError> {
    config.validate()?;
    play(config, config.run.eval_episodes, |obs| {
        let q = network.q_values(obs)?;
        Ok(argmax(&q).unwrap())
    })
}

/// Evaluates a parameter file and writes `eval_metrics.csv` and `actions.csv` to `out`.
pub fn evaluate(config: &RunConfig, params: &Path, out: &Path) -> Result<EvalOutput, HarnessError> {
    config.validate()?;
    let spec = config.agent.network_spec(OBSERVATION_DIM, Action::COUNT);
    let network = load_params(params, Some(&spec))?;
    let result = evaluate_network(config, &network)?;
    write_eval(&result, out)?;
    Ok(result)
}

pub fn write_eval(result: &EvalOutput, out: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    write_file(&out.join("eval_metrics.csv"), &metrics_csv(&result.metrics))?;
    write_file(&out.join("actions.csv"), &actions_csv(&result.actions))
}

/// Uniform-random policy on the evaluation scenarios, for reference.
pub fn random_baseline(config: &RunConfig) -> Result<EvalOutput, HarnessError> {
    config.validate()?;
    let mut rng = CounterRng::new(config.run.seed).split(STREAM_BASELINE_ACTIONS);
    play(config, config.run.baseline_episodes, |_| Ok(rng.below(Action::COUNT)))
}
